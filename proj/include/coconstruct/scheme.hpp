// scheme.hpp - Grammar and validator for the cross-turn annotation
// features carried in MISC: Coconstruct, Backchannel, Scrap, Promotion,
// Head, Speaker.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coconstruct/conllu.hpp"

namespace coco {

/// Backward pointer `<deprel>::<sent_id>::<tok_id>`. The deprel may be a
/// subtyped relation (`conj:reform`) or the special label `repair`.
struct CoconstructPointer {
    std::string deprel;
    std::string target_sent_id;
    int target_tok_id = 0;

    std::string str() const;
    static std::optional<CoconstructPointer> parse(std::string_view s);
    bool operator==(const CoconstructPointer&) const = default;
};

/// Backward pointer `<sent_id>::<tok_id>`; the relation it stands for is
/// always discourse:backchannel.
struct BackchannelPointer {
    std::string target_sent_id;
    int target_tok_id = 0;

    std::string str() const;
    static std::optional<BackchannelPointer> parse(std::string_view s);
    bool operator==(const BackchannelPointer&) const = default;
};

enum class HeadMode { Word, Position };

/// Decoded scheme features of one token. Head and Promotion values are
/// kept raw; validation decides whether they are legal.
struct SchemeFeatures {
    std::optional<CoconstructPointer> coconstruct;
    std::optional<BackchannelPointer> backchannel;
    bool scrap = false;
    std::optional<std::string> promotion;
    std::optional<std::string> head;
    std::optional<std::string> speaker;

    std::optional<HeadMode> head_mode() const;
    bool any() const {
        return coconstruct || backchannel || scrap || promotion || head;
    }
};

class SchemeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Decodes the scheme keys of one MISC list. Unrecognized keys are
/// ignored. Malformed values are reported through `problems` when given,
/// otherwise thrown as SchemeError.
SchemeFeatures parse_scheme_features(const KvList& misc,
                                     std::vector<std::string>* problems = nullptr);

enum class Severity { Error, Warning };

struct ValidationIssue {
    Severity severity = Severity::Error;
    std::string code;  // V1..V10
    std::string sent_id;
    std::optional<int> tok_id;
    std::string message;
};

struct SchemeOptions {
    /// Comment keys that carry the speaker of a sentence, first match wins.
    std::vector<std::string> speaker_comment_keys{"speaker", "speaker_id"};
};

/// All issues of a document, ordered by document position, token id, code.
/// An empty list means the document is scheme-valid.
///
/// V1  pointer/feature value syntax (also: several pointers on one token)
/// V2  pointer target sentence exists
/// V3  pointer target precedes the bearer's sentence
/// V4  pointer target token exists in the target sentence
/// V5  Head= value and placement (dependent of a promoted or repaired token)
/// V6  Promotion= value is a valid relation label
/// V7  Coconstruct deprel is a valid relation label or `repair`
/// V8  sentence is a well-formed tree (single root, connected, acyclic)
/// V9  warning: pointer links contiguous same-speaker sentences
/// V10 warning: Backchannel bearer is not the root of its sentence
std::vector<ValidationIssue> validate_document(const Document& doc,
                                               const SchemeOptions& opts = {});

bool has_errors(const std::vector<ValidationIssue>& issues);

std::string issues_to_tsv(const std::vector<ValidationIssue>& issues);
std::string issues_to_json_lines(const std::vector<ValidationIssue>& issues);

/// `deprel` label grammar: lowercase subtype chains like `obl`,
/// `conj:reform`, `discourse:backchannel`.
bool is_valid_deprel(std::string_view s);

/// Speaker of a sentence: first matching `# <key> = value` comment, else
/// the shared Speaker= MISC value when every word token agrees on one.
std::optional<std::string> sentence_speaker(const Sentence& sent,
                                            const SchemeOptions& opts = {});

class LegacyImportError : public std::runtime_error {
public:
    LegacyImportError(std::string what, std::vector<std::string> problems)
        : std::runtime_error(std::move(what)), problems_(std::move(problems)) {}
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

/// Rewrites legacy `AttachTo=`/`Rel=` annotation to Coconstruct/Backchannel
/// pointers and `conj:dicto` labels to `conj:reform`. Throws
/// LegacyImportError listing every token whose pair is incomplete.
Document import_legacy_rhapsodie(const Document& doc);

}  // namespace coco
