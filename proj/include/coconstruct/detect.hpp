// detect.hpp - Semi-automatic candidate mining over unannotated
// dialogue treebanks: backchannel candidates and potential-incompletion
// pairs.

#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "coconstruct/conllu.hpp"
#include "coconstruct/scheme.hpp"

namespace coco {

enum class LexiconProvenance { BuiltIn, Derived, File };

struct BackchannelLexicon {
    std::set<std::string> entries;  // lowercased forms
    LexiconProvenance provenance = LexiconProvenance::BuiltIn;

    bool contains(std::string_view form) const;
};

/// ASCII-lowercased copy; non-ASCII bytes pass through untouched.
std::string fold_form(std::string_view form);

/// Small cross-language seed list used when no corpus-derived or file
/// lexicon is supplied.
BackchannelLexicon builtin_lexicon();

/// Forms of tokens whose deprel starts with `discourse` or whose UPOS is
/// INTJ or PART, kept when they occur at least `min_freq` times.
BackchannelLexicon derive_lexicon(const Document& doc, int min_freq = 2);

/// One form per line, `#` starts a comment.
BackchannelLexicon load_lexicon(std::istream& in);
BackchannelLexicon load_lexicon_file(const std::string& path);

enum class CandidateKind { Backchannel, Incompletion };

struct Candidate {
    CandidateKind kind = CandidateKind::Backchannel;
    std::string first_sent_id;
    std::string second_sent_id;
    std::vector<int> trigger_tokens;
    int score = 0;
};

struct DetectOptions {
    /// Backchannel mode: require every non-punctuation token of the second
    /// sentence to be a lexicon form, instead of at least one.
    bool all_tokens = false;
    /// Forms that close an utterance for the incompletion heuristic.
    std::vector<std::string> final_punct{".", "?", "!", "…"};
    SchemeOptions scheme;
};

class DetectError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Consecutive different-speaker pairs where the first sentence is not
/// interrogative and the second contains lexicon forms. Throws
/// DetectError when speaker metadata is missing.
std::vector<Candidate> detect_backchannels(const Document& doc,
                                           const BackchannelLexicon& lex,
                                           const DetectOptions& opts = {});

/// Consecutive different-speaker pairs whose first sentence does not end
/// in final punctuation.
std::vector<Candidate> detect_incompletions(const Document& doc,
                                            const DetectOptions& opts = {});

std::string candidates_to_tsv(const std::vector<Candidate>& candidates);
std::string candidates_to_json_lines(const std::vector<Candidate>& candidates);

}  // namespace coco
