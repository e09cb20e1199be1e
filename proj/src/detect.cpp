#include "coconstruct/detect.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace coco {

std::string fold_form(std::string_view form) {
    std::string out(form);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

bool BackchannelLexicon::contains(std::string_view form) const {
    return entries.count(fold_form(form)) > 0;
}

BackchannelLexicon builtin_lexicon() {
    return {{
                "ah",    "aha",  "aja",   "brav",  "certo", "dobro", "ecco",
                "eh",    "esatto", "ja",  "mh",    "mhm",   "mhmh",  "mm",
                "no",    "ok",   "okay",  "okej",  "right", "si",    "sì",
                "tako",  "yeah", "yes",
            },
            LexiconProvenance::BuiltIn};
}

BackchannelLexicon derive_lexicon(const Document& doc, int min_freq) {
    std::map<std::string, int> freq;
    for (const auto& sent : doc.sentences)
        for (const auto& t : sent.tokens) {
            if (!t.is_word()) continue;
            bool discourse = std::string_view(t.deprel).starts_with("discourse");
            bool intj_part = t.upos == "INTJ" || t.upos == "PART";
            if (discourse || intj_part) ++freq[fold_form(t.form)];
        }
    BackchannelLexicon lex;
    lex.provenance = LexiconProvenance::Derived;
    for (const auto& [form, n] : freq)
        if (n >= min_freq) lex.entries.insert(form);
    return lex;
}

BackchannelLexicon load_lexicon(std::istream& in) {
    BackchannelLexicon lex;
    lex.provenance = LexiconProvenance::File;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t'))
            line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        lex.entries.insert(fold_form(line.substr(start)));
    }
    return lex;
}

BackchannelLexicon load_lexicon_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DetectError("cannot open lexicon file '" + path + "'");
    return load_lexicon(in);
}

namespace {

std::vector<std::optional<std::string>> speakers_or_throw(const Document& doc,
                                                          const SchemeOptions& scheme) {
    std::vector<std::optional<std::string>> speakers;
    std::vector<std::string> missing;
    for (const auto& sent : doc.sentences) {
        speakers.push_back(sentence_speaker(sent, scheme));
        if (!speakers.back())
            missing.push_back(sent.sent_id.empty()
                                  ? "#" + std::to_string(sent.document_position + 1)
                                  : sent.sent_id);
    }
    if (!missing.empty()) {
        std::string list;
        for (std::size_t i = 0; i < missing.size() && i < 10; ++i)
            list += (i ? ", " : "") + missing[i];
        if (missing.size() > 10) list += ", ...";
        throw DetectError("speaker metadata missing for " +
                          std::to_string(missing.size()) + " sentence(s): " + list);
    }
    return speakers;
}

bool is_interrogative(const Sentence& sent) {
    for (const auto& t : sent.tokens)
        if (t.id.kind != RowKind::Empty && t.form == "?") return true;
    std::string_view text = sent.text;
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t'))
        text.remove_suffix(1);
    return text.ends_with('?');
}

bool ends_complete(const Sentence& sent, const DetectOptions& opts) {
    // Last non-symbol surface token decides.
    const Token* last = nullptr;
    for (const auto& t : sent.tokens) {
        if (!t.is_word()) continue;
        if (t.upos == "SYM") continue;
        last = &t;
    }
    if (!last || last->upos != "PUNCT") return false;
    return std::find(opts.final_punct.begin(), opts.final_punct.end(), last->form) !=
           opts.final_punct.end();
}

}  // namespace

std::vector<Candidate> detect_backchannels(const Document& doc,
                                           const BackchannelLexicon& lex,
                                           const DetectOptions& opts) {
    auto speakers = speakers_or_throw(doc, opts.scheme);
    std::vector<Candidate> out;
    for (std::size_t i = 0; i + 1 < doc.sentences.size(); ++i) {
        const Sentence& first = doc.sentences[i];
        const Sentence& second = doc.sentences[i + 1];
        if (*speakers[i] == *speakers[i + 1]) continue;
        if (is_interrogative(first)) continue;

        std::vector<int> triggers;
        bool all = true;
        for (const auto& t : second.tokens) {
            if (!t.is_word()) continue;
            if (t.upos == "PUNCT") continue;
            if (lex.contains(t.form))
                triggers.push_back(t.id.index);
            else
                all = false;
        }
        if (triggers.empty()) continue;
        if (opts.all_tokens && !all) continue;
        out.push_back({CandidateKind::Backchannel, first.sent_id, second.sent_id,
                       triggers, static_cast<int>(triggers.size())});
    }
    return out;
}

std::vector<Candidate> detect_incompletions(const Document& doc,
                                            const DetectOptions& opts) {
    auto speakers = speakers_or_throw(doc, opts.scheme);
    std::vector<Candidate> out;
    for (std::size_t i = 0; i + 1 < doc.sentences.size(); ++i) {
        const Sentence& first = doc.sentences[i];
        const Sentence& second = doc.sentences[i + 1];
        if (*speakers[i] == *speakers[i + 1]) continue;
        if (ends_complete(first, opts)) continue;
        const Token* last = nullptr;
        for (const auto& t : first.tokens)
            if (t.is_word() && t.upos != "SYM") last = &t;
        std::vector<int> evidence;
        if (last) evidence.push_back(last->id.index);
        out.push_back({CandidateKind::Incompletion, first.sent_id, second.sent_id,
                       evidence, 1});
    }
    return out;
}

std::string candidates_to_tsv(const std::vector<Candidate>& candidates) {
    std::ostringstream out;
    for (const auto& c : candidates) {
        out << (c.kind == CandidateKind::Backchannel ? "backchannel" : "incompletion")
            << '\t' << c.first_sent_id << '\t' << c.second_sent_id << '\t';
        for (std::size_t i = 0; i < c.trigger_tokens.size(); ++i)
            out << (i ? "," : "") << c.trigger_tokens[i];
        out << '\t' << c.score << '\n';
    }
    return out.str();
}

std::string candidates_to_json_lines(const std::vector<Candidate>& candidates) {
    std::ostringstream out;
    for (const auto& c : candidates) {
        nlohmann::json j{
            {"kind", c.kind == CandidateKind::Backchannel ? "backchannel" : "incompletion"},
            {"first_sent_id", c.first_sent_id},
            {"second_sent_id", c.second_sent_id},
            {"trigger_tokens", c.trigger_tokens},
            {"score", c.score},
        };
        out << j.dump() << '\n';
    }
    return out.str();
}

}  // namespace coco
