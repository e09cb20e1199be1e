#include "coconstruct/scheme.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include <json.hpp>

namespace coco {

namespace {

bool is_positive_index(std::string_view s, int* out) {
    if (s.empty() || s.size() > 9) return false;
    if (!std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isdigit(c); }))
        return false;
    if (s.size() > 1 && s[0] == '0') return false;
    int v = 0;
    for (char c : s) v = v * 10 + (c - '0');
    if (v < 1) return false;
    *out = v;
    return true;
}

}  // namespace

std::string CoconstructPointer::str() const {
    return deprel + "::" + target_sent_id + "::" + std::to_string(target_tok_id);
}

std::optional<CoconstructPointer> CoconstructPointer::parse(std::string_view s) {
    std::size_t first = s.find("::");
    std::size_t last = s.rfind("::");
    if (first == std::string_view::npos || last < first + 2) return std::nullopt;
    std::string_view deprel = s.substr(0, first);
    std::string_view sent = s.substr(first + 2, last - first - 2);
    std::string_view tok = s.substr(last + 2);
    if (deprel.empty() || sent.empty()) return std::nullopt;
    if (sent.find("::") != std::string_view::npos) return std::nullopt;
    CoconstructPointer p;
    if (!is_positive_index(tok, &p.target_tok_id)) return std::nullopt;
    p.deprel = std::string(deprel);
    p.target_sent_id = std::string(sent);
    return p;
}

std::string BackchannelPointer::str() const {
    return target_sent_id + "::" + std::to_string(target_tok_id);
}

std::optional<BackchannelPointer> BackchannelPointer::parse(std::string_view s) {
    std::size_t first = s.find("::");
    if (first == std::string_view::npos || s.rfind("::") != first) return std::nullopt;
    std::string_view sent = s.substr(0, first);
    std::string_view tok = s.substr(first + 2);
    if (sent.empty()) return std::nullopt;
    BackchannelPointer p;
    if (!is_positive_index(tok, &p.target_tok_id)) return std::nullopt;
    p.target_sent_id = std::string(sent);
    return p;
}

std::optional<HeadMode> SchemeFeatures::head_mode() const {
    if (!head) return std::nullopt;
    if (*head == "Word") return HeadMode::Word;
    if (*head == "Position") return HeadMode::Position;
    return std::nullopt;
}

SchemeFeatures parse_scheme_features(const KvList& misc,
                                     std::vector<std::string>* problems) {
    SchemeFeatures f;
    std::vector<std::string> local;
    std::vector<std::string>& out = problems ? *problems : local;

    if (kv_count(misc, "Coconstruct") > 1)
        out.push_back("token bears more than one Coconstruct value");
    if (kv_count(misc, "Backchannel") > 1)
        out.push_back("token bears more than one Backchannel value");

    for (const auto& e : misc) {
        if (!e.has_value) continue;
        if (e.key == "Coconstruct") {
            if (auto p = CoconstructPointer::parse(e.value)) {
                if (!f.coconstruct) f.coconstruct = *p;
            } else {
                out.push_back("malformed Coconstruct value '" + e.value + "'");
            }
        } else if (e.key == "Backchannel") {
            if (auto p = BackchannelPointer::parse(e.value)) {
                if (!f.backchannel) f.backchannel = *p;
            } else {
                out.push_back("malformed Backchannel value '" + e.value + "'");
            }
        } else if (e.key == "Scrap") {
            if (e.value == "Yes")
                f.scrap = true;
            else
                out.push_back("invalid Scrap value '" + e.value + "' (expected Yes)");
        } else if (e.key == "Promotion") {
            if (!f.promotion) f.promotion = e.value;
        } else if (e.key == "Head") {
            if (!f.head) f.head = e.value;
        } else if (e.key == "Speaker") {
            if (!f.speaker) f.speaker = e.value;
        }
    }
    if (!problems && !local.empty()) throw SchemeError(local.front());
    return f;
}

bool is_valid_deprel(std::string_view s) {
    if (s.empty()) return false;
    bool at_segment_start = true;
    bool first_segment = true;
    for (char c : s) {
        if (c == ':') {
            if (at_segment_start) return false;
            at_segment_start = true;
            first_segment = false;
            continue;
        }
        bool ok = (c >= 'a' && c <= 'z') ||
                  (!first_segment && ((c >= '0' && c <= '9') || c == '_'));
        if (!ok) return false;
        at_segment_start = false;
    }
    return !at_segment_start;
}

std::optional<std::string> sentence_speaker(const Sentence& sent,
                                            const SchemeOptions& opts) {
    for (const auto& key : opts.speaker_comment_keys)
        if (auto v = comment_value(sent, key))
            if (!v->empty()) return v;
    // Converted views carry the speaker per token; accept it when uniform.
    std::optional<std::string> uniform;
    for (const auto& t : sent.tokens) {
        if (!t.is_word()) continue;
        auto v = kv_get(t.misc, "Speaker");
        if (!v) return std::nullopt;
        if (!uniform)
            uniform = v;
        else if (*uniform != *v)
            return std::nullopt;
    }
    return uniform;
}

bool has_errors(const std::vector<ValidationIssue>& issues) {
    return std::any_of(issues.begin(), issues.end(), [](const ValidationIssue& i) {
        return i.severity == Severity::Error;
    });
}

namespace {

int code_number(const std::string& code) {
    int v = 0;
    for (std::size_t i = 1; i < code.size(); ++i) v = v * 10 + (code[i] - '0');
    return v;
}

struct Validator {
    const Document& doc;
    const SchemeOptions& opts;
    std::vector<std::pair<int, ValidationIssue>> tagged;  // document position + issue
    std::vector<std::optional<std::string>> speakers;
    std::set<std::pair<std::string, int>> repair_targets;

    void add(Severity sev, const char* code, const Sentence& sent,
             std::optional<int> tok, std::string msg) {
        tagged.push_back({sent.document_position,
                          {sev, code, sent.sent_id, tok, std::move(msg)}});
    }

    // V2/V3/V4 share one resolution chain; each needs the previous to hold.
    bool check_target(const Sentence& sent, int tok, const std::string& sent_ref,
                      int tok_ref, const char* kind) {
        const Sentence* target = doc.by_id(sent_ref);
        if (!target) {
            add(Severity::Error, "V2", sent, tok,
                std::string(kind) + " target sentence '" + sent_ref + "' does not exist");
            return false;
        }
        if (target->document_position >= sent.document_position) {
            add(Severity::Error, "V3", sent, tok,
                std::string(kind) + " pointer must aim backward: '" + sent_ref +
                    "' does not precede this sentence");
            return false;
        }
        if (!target->word(tok_ref)) {
            add(Severity::Error, "V4", sent, tok,
                std::string(kind) + " target token " + std::to_string(tok_ref) +
                    " does not exist in sentence '" + sent_ref + "'");
            return false;
        }
        return true;
    }

    void check_tree(const Sentence& sent) {
        std::vector<int> roots;
        int n = sent.word_count();
        std::vector<std::vector<int>> children(static_cast<std::size_t>(n) + 1);
        for (const auto& t : sent.tokens) {
            if (!t.is_word()) continue;
            if (!t.head) {
                add(Severity::Error, "V8", sent, std::nullopt,
                    "token " + std::to_string(t.id.index) + " has no head");
                return;
            }
            if (*t.head == 0)
                roots.push_back(t.id.index);
            else
                children[static_cast<std::size_t>(*t.head)].push_back(t.id.index);
        }
        if (roots.size() != 1) {
            add(Severity::Error, "V8", sent, std::nullopt,
                "sentence has " + std::to_string(roots.size()) + " roots");
            return;
        }
        std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
        std::vector<int> stack{roots[0]};
        int reached = 0;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            if (seen[static_cast<std::size_t>(v)]) continue;
            seen[static_cast<std::size_t>(v)] = true;
            ++reached;
            for (int c : children[static_cast<std::size_t>(v)]) stack.push_back(c);
        }
        if (reached != n)
            add(Severity::Error, "V8", sent, std::nullopt,
                "tree is not connected: " + std::to_string(n - reached) +
                    " token(s) unreachable from the root (cycle or orphan)");
    }

    void run() {
        speakers.reserve(doc.sentences.size());
        for (const auto& sent : doc.sentences)
            speakers.push_back(sentence_speaker(sent, opts));

        // Repair targets legitimize Head= marks on their dependents.
        for (const auto& sent : doc.sentences)
            for (const auto& t : sent.tokens) {
                if (!t.is_word()) continue;
                std::vector<std::string> ignored;
                SchemeFeatures f = parse_scheme_features(t.misc, &ignored);
                if (f.coconstruct && f.coconstruct->deprel == "repair")
                    repair_targets.emplace(f.coconstruct->target_sent_id,
                                           f.coconstruct->target_tok_id);
            }

        for (const auto& sent : doc.sentences) {
            for (const auto& t : sent.tokens) {
                if (!t.is_word()) continue;
                int tok = t.id.index;
                std::vector<std::string> problems;
                SchemeFeatures f = parse_scheme_features(t.misc, &problems);
                for (const auto& p : problems)
                    add(Severity::Error, "V1", sent, tok, p);
                if (f.coconstruct && f.backchannel)
                    add(Severity::Warning, "V1", sent, tok,
                        "token bears both Coconstruct and Backchannel; intent is ambiguous");

                if (f.coconstruct) {
                    const auto& p = *f.coconstruct;
                    if (p.deprel != "repair" && !is_valid_deprel(p.deprel))
                        add(Severity::Error, "V7", sent, tok,
                            "Coconstruct deprel '" + p.deprel +
                                "' is not a valid relation label or 'repair'");
                    if (check_target(sent, tok, p.target_sent_id, p.target_tok_id,
                                     "Coconstruct")) {
                        const Sentence* target = doc.by_id(p.target_sent_id);
                        auto& s_bearer = speakers[static_cast<std::size_t>(sent.document_position)];
                        auto& s_target = speakers[static_cast<std::size_t>(target->document_position)];
                        if (target->document_position == sent.document_position - 1 &&
                            s_bearer && s_target && *s_bearer == *s_target)
                            add(Severity::Warning, "V9", sent, tok,
                                "Coconstruct links contiguous sentences of speaker '" +
                                    *s_bearer + "'; these should be merged into one unit");
                    }
                }
                if (f.backchannel) {
                    const auto& p = *f.backchannel;
                    check_target(sent, tok, p.target_sent_id, p.target_tok_id,
                                 "Backchannel");
                    if (!t.head || *t.head != 0)
                        add(Severity::Warning, "V10", sent, tok,
                            "Backchannel bearer is not the root of its sentence");
                }
                if (f.head) {
                    if (!f.head_mode()) {
                        add(Severity::Error, "V5", sent, tok,
                            "invalid Head value '" + *f.head +
                                "' (expected Word or Position)");
                    } else {
                        const Token* gov = (t.head && *t.head > 0) ? sent.word(*t.head) : nullptr;
                        bool gov_promoted = gov && kv_find(gov->misc, "Promotion");
                        bool gov_repaired =
                            gov && repair_targets.count({sent.sent_id, gov->id.index}) > 0;
                        if (!gov_promoted && !gov_repaired)
                            add(Severity::Error, "V5", sent, tok,
                                "Head= is only meaningful on a dependent of a promoted "
                                "or repaired token");
                    }
                }
                if (f.promotion && !is_valid_deprel(*f.promotion))
                    add(Severity::Error, "V6", sent, tok,
                        "Promotion value '" + *f.promotion +
                            "' is not a valid relation label");
                else if (f.promotion && !f.scrap)
                    add(Severity::Warning, "V6", sent, tok,
                        "Promotion without Scrap=Yes is unusual (gapping use?)");
            }
            check_tree(sent);
        }

        std::stable_sort(tagged.begin(), tagged.end(),
                         [](const auto& a, const auto& b) {
                             return std::tuple(a.first, a.second.tok_id.value_or(0),
                                               code_number(a.second.code)) <
                                    std::tuple(b.first, b.second.tok_id.value_or(0),
                                               code_number(b.second.code));
                         });
    }
};

}  // namespace

std::vector<ValidationIssue> validate_document(const Document& doc,
                                               const SchemeOptions& opts) {
    Validator v{doc, opts};
    v.run();
    std::vector<ValidationIssue> out;
    out.reserve(v.tagged.size());
    for (auto& [pos, issue] : v.tagged) out.push_back(std::move(issue));
    return out;
}

std::string issues_to_tsv(const std::vector<ValidationIssue>& issues) {
    std::ostringstream out;
    for (const auto& i : issues) {
        out << (i.severity == Severity::Error ? "error" : "warning") << '\t'
            << i.code << '\t' << i.sent_id << '\t'
            << (i.tok_id ? std::to_string(*i.tok_id) : "") << '\t' << i.message
            << '\n';
    }
    return out.str();
}

std::string issues_to_json_lines(const std::vector<ValidationIssue>& issues) {
    std::ostringstream out;
    for (const auto& i : issues) {
        nlohmann::json j{
            {"severity", i.severity == Severity::Error ? "error" : "warning"},
            {"code", i.code},
            {"sent_id", i.sent_id},
            {"tok_id", i.tok_id ? nlohmann::json(*i.tok_id) : nlohmann::json()},
            {"message", i.message},
        };
        out << j.dump() << '\n';
    }
    return out.str();
}

Document import_legacy_rhapsodie(const Document& doc) {
    Document out = doc;
    std::vector<std::string> problems;
    for (auto& sent : out.sentences) {
        for (auto& t : sent.tokens) {
            if (t.deprel == "conj:dicto") t.deprel = "conj:reform";
            for (auto& d : t.deps)
                if (d.label == "conj:dicto") d.label = "conj:reform";

            auto attach = kv_get(t.misc, "AttachTo");
            auto rel = kv_get(t.misc, "Rel");
            std::string where = "sentence '" + sent.sent_id + "' token " + t.id.str();
            if (!attach && !rel) continue;
            if (!attach) {
                problems.push_back(where + ": Rel without AttachTo");
                continue;
            }
            if (!rel) {
                problems.push_back(where + ": AttachTo without Rel");
                continue;
            }
            auto addr = BackchannelPointer::parse(*attach);
            if (!addr) {
                problems.push_back(where + ": malformed AttachTo value '" + *attach + "'");
                continue;
            }
            std::string key, value;
            if (*rel == "discourse") {
                key = "Backchannel";
                value = addr->str();
            } else {
                std::string label = (*rel == "conj:dicto") ? "conj:reform" : *rel;
                key = "Coconstruct";
                value = CoconstructPointer{label, addr->target_sent_id,
                                           addr->target_tok_id}
                            .str();
            }
            for (auto& e : t.misc) {
                if (e.has_value && e.key == "AttachTo") {
                    e.key = key;
                    e.value = value;
                    break;
                }
            }
            kv_erase(t.misc, "Rel");
        }
    }
    if (!problems.empty())
        throw LegacyImportError("legacy import failed for " +
                                    std::to_string(problems.size()) + " token(s)",
                                problems);
    return out;
}

}  // namespace coco
