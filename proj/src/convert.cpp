#include "coconstruct/convert.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace coco {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int v) {
        while (parent[static_cast<std::size_t>(v)] != v) {
            parent[static_cast<std::size_t>(v)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
            v = parent[static_cast<std::size_t>(v)];
        }
        return v;
    }
    void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

SchemeFeatures features_of(const Token& t) {
    std::vector<std::string> ignored;
    return parse_scheme_features(t.misc, &ignored);
}

std::string member_label(const Sentence& sent) {
    if (!sent.sent_id.empty()) return sent.sent_id;
    return std::to_string(sent.document_position + 1);
}

std::string member_text(const Sentence& sent) {
    if (!sent.text.empty()) return sent.text;
    return rebuild_text(sent);
}

// Comments that the conversion owns: sentence id, text, and the speaker
// metadata that moves to tokens. Everything else is carried over.
bool comment_is_consumed(const std::string& comment, const SchemeOptions& opts) {
    if (is_comment_for_key(comment, "sent_id") || is_comment_for_key(comment, "text"))
        return true;
    for (const auto& key : opts.speaker_comment_keys)
        if (is_comment_for_key(comment, key)) return true;
    return false;
}

}  // namespace

std::vector<RectionalUnit> cluster_units(const Document& doc,
                                         const ConvertOptions& opts) {
    UnionFind uf(doc.sentences.size());
    for (const auto& sent : doc.sentences) {
        for (const auto& t : sent.tokens) {
            if (!t.is_word()) continue;
            SchemeFeatures f = features_of(t);
            auto link = [&](const std::string& target_sent) {
                auto it = doc.sent_index.find(target_sent);
                if (it == doc.sent_index.end())
                    throw ConvertError(sent.sent_id,
                                       "pointer target sentence '" + target_sent +
                                           "' does not exist (document was not validated)");
                uf.unite(sent.document_position, it->second);
            };
            if (f.coconstruct) link(f.coconstruct->target_sent_id);
            if (opts.include_backchannels && f.backchannel)
                link(f.backchannel->target_sent_id);
        }
    }

    std::unordered_map<int, std::size_t> unit_of_root;
    std::vector<RectionalUnit> units;
    for (const auto& sent : doc.sentences) {
        int root = uf.find(sent.document_position);
        auto it = unit_of_root.find(root);
        if (it == unit_of_root.end()) {
            it = unit_of_root.emplace(root, units.size()).first;
            units.emplace_back();
        }
        units[it->second].members.push_back(sent.document_position);
    }

    for (auto& unit : units) {
        std::string id;
        int base = 0;
        for (int pos : unit.members) {
            const Sentence& sent = doc.sentences[static_cast<std::size_t>(pos)];
            if (!id.empty()) id += '+';
            id += member_label(sent);
            for (const auto& t : sent.tokens) {
                UnitToken ut{t, pos, t.id};
                Token& tok = ut.token;
                tok.id.index += base;
                if (tok.id.kind == RowKind::Range) tok.id.sub += base;
                if (tok.head && *tok.head > 0) tok.head = *tok.head + base;
                for (auto& d : tok.deps)
                    if (d.head.index > 0) d.head.index += base;
                if (t.id.kind == RowKind::Word)
                    unit.word_map[{pos, t.id.index}] = tok.id.index;
                unit.tokens.push_back(std::move(ut));
            }
            base += sent.word_count();
        }
        unit.id = id;
    }
    return units;
}

namespace {

struct GraphBuilder {
    RectionalUnit& unit;
    const Document& doc;
    const ConvertOptions& opts;
    std::unordered_map<int, std::size_t> token_index;  // word id -> unit.tokens index

    const Token& token(int id) const {
        return unit.tokens[token_index.at(id)].token;
    }

    std::vector<std::size_t> active_incoming(int dep) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < unit.edges.size(); ++i)
            if (unit.edges[i].dep == dep && unit.edges[i].tag != EdgeTag::Sb)
                out.push_back(i);
        return out;
    }

    void demote(std::size_t idx) { unit.edges[idx].tag = EdgeTag::Sb; }

    void attach(int head, int dep, std::string label) {
        unit.edges.push_back({head, dep, std::move(label), EdgeTag::Attach});
    }

    // A token that gains an incoming attach edge gives up its
    // speaker-based incoming edge.
    void supersede_tree_incoming(int dep) {
        for (std::size_t i = 0; i < unit.edges.size(); ++i)
            if (unit.edges[i].dep == dep && unit.edges[i].tag == EdgeTag::Tree)
                demote(i);
    }

    // Re-attaches Head=Position dependents of `from` under `to`;
    // Head=Word dependents stay put. Both marks are consumed.
    void lift_dependents(int from, int to) {
        std::vector<std::size_t> tree_children;
        for (std::size_t i = 0; i < unit.edges.size(); ++i)
            if (unit.edges[i].head == from && unit.edges[i].tag == EdgeTag::Tree)
                tree_children.push_back(i);
        for (std::size_t i : tree_children) {
            int child = unit.edges[i].dep;
            auto mode = features_of(token(child)).head_mode();
            if (!mode) continue;
            unit.consumed_head_marks.insert(child);
            if (*mode == HeadMode::Position) {
                std::string label = unit.edges[i].label;
                demote(i);
                attach(to, child, label);
            }
        }
    }

    int resolve_target(const std::string& sent_ref, int tok_ref) const {
        auto sit = doc.sent_index.find(sent_ref);
        if (sit == doc.sent_index.end())
            throw ConvertError(unit.id, "pointer target sentence '" + sent_ref +
                                            "' does not exist");
        auto wit = unit.word_map.find({sit->second, tok_ref});
        if (wit == unit.word_map.end())
            throw ConvertError(unit.id, "pointer target " + sent_ref +
                                            "::" + std::to_string(tok_ref) +
                                            " is not part of this unit");
        return wit->second;
    }

    void apply_coconstruct(int bearer, const CoconstructPointer& ptr) {
        int target = resolve_target(ptr.target_sent_id, ptr.target_tok_id);
        if (ptr.deprel == "repair") {
            auto inc = active_incoming(target);
            if (inc.size() != 1)
                throw ConvertError(unit.id,
                                   "repair target '" + token(target).form + "' (" +
                                       std::to_string(target) + ") has " +
                                       std::to_string(inc.size()) +
                                       " active incoming edges");
            GraphEdge superseded = unit.edges[inc[0]];
            demote(inc[0]);
            attach(superseded.head, bearer, superseded.label);
            attach(bearer, target, "reparandum");
            lift_dependents(target, bearer);
        } else {
            // Scrap resolution: the promoted element either hangs under the
            // target with the pointed relation, or is the target itself.
            std::vector<std::size_t> candidates;
            for (std::size_t i = 0; i < unit.edges.size(); ++i) {
                const GraphEdge& e = unit.edges[i];
                if (e.tag != EdgeTag::Tree || e.label != ptr.deprel) continue;
                if (e.head == target &&
                    kv_find(token(e.dep).misc, "Promotion"))
                    candidates.push_back(i);
                else if (e.dep == target &&
                         kv_find(token(target).misc, "Promotion"))
                    candidates.push_back(i);
            }
            if (candidates.size() > 1) {
                const GraphEdge& a = unit.edges[candidates[0]];
                const GraphEdge& b = unit.edges[candidates[1]];
                throw ConvertError(unit.id,
                                   "ambiguous scrap resolution for relation '" +
                                       ptr.deprel + "': both '" + token(a.dep).form +
                                       "' (" + std::to_string(a.dep) + ") and '" +
                                       token(b.dep).form + "' (" +
                                       std::to_string(b.dep) + ") qualify");
            }
            if (candidates.size() == 1) {
                GraphEdge superseded = unit.edges[candidates[0]];
                int scrap = superseded.dep;
                std::string promoted_rel =
                    kv_get(token(scrap).misc, "Promotion").value_or("");
                demote(candidates[0]);
                attach(superseded.head, bearer, superseded.label);
                attach(bearer, scrap, promoted_rel);
                lift_dependents(scrap, bearer);
                unit.resolved_scraps.insert(scrap);
            } else {
                attach(target, bearer, ptr.deprel);
            }
        }
        unit.consumed_coconstruct.insert(bearer);
        supersede_tree_incoming(bearer);
    }

    void apply_backchannel(int bearer, const BackchannelPointer& ptr) {
        int target = resolve_target(ptr.target_sent_id, ptr.target_tok_id);
        attach(target, bearer, "discourse:backchannel");
        unit.consumed_backchannel.insert(bearer);
        supersede_tree_incoming(bearer);
    }

    void run() {
        unit.edges.clear();
        for (std::size_t i = 0; i < unit.tokens.size(); ++i) {
            const Token& t = unit.tokens[i].token;
            if (t.is_word()) token_index[t.id.index] = i;
        }
        for (const auto& ut : unit.tokens) {
            const Token& t = ut.token;
            if (!t.is_word() || !t.head) continue;
            unit.edges.push_back({*t.head, t.id.index, t.deprel, EdgeTag::Tree});
        }
        // Bearers are processed in document order; attach edges always aim
        // backward, so earlier transformations are visible to later ones.
        for (const auto& ut : unit.tokens) {
            const Token& t = ut.token;
            if (!t.is_word()) continue;
            SchemeFeatures f = features_of(t);
            if (f.coconstruct) apply_coconstruct(t.id.index, *f.coconstruct);
            if (opts.include_backchannels && f.backchannel)
                apply_backchannel(t.id.index, *f.backchannel);
        }
    }
};

}  // namespace

void build_intermediate_graph(RectionalUnit& unit, const Document& doc,
                              const ConvertOptions& opts) {
    GraphBuilder builder{unit, doc, opts};
    builder.run();
}

namespace {

bool unit_was_rewritten(const RectionalUnit& unit) {
    return std::any_of(unit.edges.begin(), unit.edges.end(), [](const GraphEdge& e) {
        return e.tag != EdgeTag::Tree;
    });
}

struct ProjectedTree {
    // word id -> chosen (head, label)
    std::map<int, std::pair<int, std::string>> heads;
};

ProjectedTree project_tree(const RectionalUnit& unit) {
    ProjectedTree tree;
    std::map<int, std::vector<const GraphEdge*>> incoming;
    std::map<int, std::string> forms;
    for (const auto& ut : unit.tokens)
        if (ut.token.is_word()) {
            incoming[ut.token.id.index];
            forms[ut.token.id.index] = ut.token.form;
        }
    for (const auto& e : unit.edges)
        if (e.tag != EdgeTag::Sb) incoming[e.dep].push_back(&e);

    std::vector<int> roots;
    for (auto& [id, edges] : incoming) {
        if (edges.size() != 1)
            throw ConvertError(unit.id, "token " + std::to_string(id) + " ('" +
                                            forms[id] + "') has " +
                                            std::to_string(edges.size()) +
                                            " heads in the projected tree");
        tree.heads[id] = {edges[0]->head, edges[0]->label};
        if (edges[0]->head == 0) roots.push_back(id);
    }
    if (roots.size() != 1)
        throw ConvertError(unit.id, "projection yields " +
                                        std::to_string(roots.size()) +
                                        " roots instead of one");
    // Reachability from the root covers connectivity and acyclicity.
    std::map<int, std::vector<int>> children;
    for (const auto& [id, hl] : tree.heads)
        if (hl.first != 0) children[hl.first].push_back(id);
    std::vector<int> stack{roots[0]};
    std::size_t reached = 0;
    std::map<int, bool> seen;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (seen[v]) continue;
        seen[v] = true;
        ++reached;
        for (int c : children[v]) stack.push_back(c);
    }
    if (reached != tree.heads.size())
        throw ConvertError(unit.id,
                           "projected structure contains a cycle or detached part (" +
                               std::to_string(tree.heads.size() - reached) +
                               " token(s) unreachable)");
    return tree;
}

std::string merged_text(const RectionalUnit& unit, const Document& doc) {
    std::string text;
    for (int pos : unit.members) {
        std::string part = member_text(doc.sentences[static_cast<std::size_t>(pos)]);
        if (part.empty()) continue;
        if (!text.empty()) text += ' ';
        text += part;
    }
    return text;
}

std::vector<std::string> merged_comments(const RectionalUnit& unit,
                                         const Document& doc, const std::string& id,
                                         const std::string& text,
                                         const SchemeOptions& scheme) {
    std::vector<std::string> out;
    out.push_back("# sent_id = " + id);
    out.push_back("# text = " + text);
    for (int pos : unit.members)
        for (const auto& c : doc.sentences[static_cast<std::size_t>(pos)].comments)
            if (!comment_is_consumed(c, scheme)) out.push_back(c);
    return out;
}

void migrate_token_metadata(Token& tok, const RectionalUnit& unit,
                            const std::optional<std::string>& speaker,
                            const std::string& src_sent_id, bool stamp_provenance) {
    if (!tok.is_word()) return;
    if (speaker && !kv_find(tok.misc, "Speaker"))
        tok.misc.push_back({"Speaker", *speaker, true});
    if (stamp_provenance && !kv_find(tok.misc, "CoconstructFrom"))
        tok.misc.push_back({"CoconstructFrom", src_sent_id, true});
}

}  // namespace

Sentence project_dependency_view(const RectionalUnit& unit, const Document& doc,
                                 const ConvertOptions& opts) {
    ProjectedTree tree = project_tree(unit);
    bool rewritten = unit_was_rewritten(unit);
    bool multi = unit.members.size() > 1;

    Sentence out;
    out.sent_id = unit.id;
    out.text = merged_text(unit, doc);
    out.comments = merged_comments(unit, doc, out.sent_id, out.text, opts.scheme);

    std::vector<std::optional<std::string>> speaker_by_pos(doc.sentences.size());
    for (int pos : unit.members)
        speaker_by_pos[static_cast<std::size_t>(pos)] =
            sentence_speaker(doc.sentences[static_cast<std::size_t>(pos)], opts.scheme);

    for (const auto& ut : unit.tokens) {
        Token tok = ut.token;
        if (tok.is_word()) {
            auto& [head, label] = tree.heads.at(tok.id.index);
            tok.head = head;
            tok.deprel = label;
            if (rewritten) tok.deps.clear();
            int id = tok.id.index;
            if (unit.consumed_coconstruct.count(id)) kv_erase(tok.misc, "Coconstruct");
            if (unit.consumed_backchannel.count(id)) kv_erase(tok.misc, "Backchannel");
            if (unit.resolved_scraps.count(id)) {
                kv_erase(tok.misc, "Scrap");
                kv_erase(tok.misc, "Promotion");
            }
            if (unit.consumed_head_marks.count(id)) kv_erase(tok.misc, "Head");
        }
        const Sentence& src = doc.sentences[static_cast<std::size_t>(ut.src_sentence)];
        migrate_token_metadata(tok, unit,
                               speaker_by_pos[static_cast<std::size_t>(ut.src_sentence)],
                               member_label(src), multi);
        out.tokens.push_back(std::move(tok));
    }
    return out;
}

Sentence render_intermediate_view(const RectionalUnit& unit, const Document& doc,
                                  const ConvertOptions& opts) {
    Sentence out;
    out.sent_id = unit.id;
    out.text = merged_text(unit, doc);
    out.comments = merged_comments(unit, doc, out.sent_id, out.text, opts.scheme);

    std::map<int, std::vector<DepsEntry>> graph_deps;
    for (const auto& e : unit.edges) {
        std::string label = e.label;
        if (e.tag == EdgeTag::Attach) label += "/attach";
        if (e.tag == EdgeTag::Sb) label += "/sb";
        graph_deps[e.dep].push_back({TokenId{RowKind::Word, e.head, 0}, std::move(label)});
    }
    for (auto& [dep, entries] : graph_deps)
        std::sort(entries.begin(), entries.end(),
                  [](const DepsEntry& a, const DepsEntry& b) {
                      if (!(a.head == b.head)) return a.head < b.head;
                      return a.label < b.label;
                  });

    for (const auto& ut : unit.tokens) {
        Token tok = ut.token;
        if (tok.is_word()) {
            auto it = graph_deps.find(tok.id.index);
            tok.deps = (it != graph_deps.end()) ? it->second : std::vector<DepsEntry>{};
        }
        const Sentence& src = doc.sentences[static_cast<std::size_t>(ut.src_sentence)];
        migrate_token_metadata(tok, unit, sentence_speaker(src, opts.scheme),
                               member_label(src), false);
        out.tokens.push_back(std::move(tok));
    }
    return out;
}

bool is_intermediate_view(const Document& doc) {
    for (const auto& sent : doc.sentences)
        for (const auto& t : sent.tokens)
            for (const auto& d : t.deps) {
                std::string_view label = d.label;
                if (label.ends_with("/attach") || label.ends_with("/sb")) return true;
            }
    return false;
}

ConvertResult convert_document(const Document& doc, const ConvertOptions& opts) {
    if (is_intermediate_view(doc))
        throw ConvertError("",
                           "input already carries /attach or /sb edges: the "
                           "intermediate view is terminal and cannot be converted");
    auto issues = validate_document(doc, opts.scheme);
    if (has_errors(issues)) {
        std::string first;
        for (const auto& i : issues)
            if (i.severity == Severity::Error) {
                first = i.code + " at '" + i.sent_id + "': " + i.message;
                break;
            }
        throw ConvertError("", "document is not scheme-valid (" + first + ")");
    }

    ConvertResult result;
    std::vector<RectionalUnit> units = cluster_units(doc, opts);
    for (auto& unit : units) {
        build_intermediate_graph(unit, doc, opts);
        result.intermediate.sentences.push_back(render_intermediate_view(unit, doc, opts));
        result.dependency.sentences.push_back(project_dependency_view(unit, doc, opts));
    }

    // Unconsumed Backchannel pointers still reference speaker-based
    // sentences; re-aim them at the merged coordinates.
    std::map<std::pair<std::string, int>, std::pair<std::string, int>> relocation;
    for (const auto& unit : units)
        for (const auto& [src, new_id] : unit.word_map) {
            const Sentence& s = doc.sentences[static_cast<std::size_t>(src.first)];
            if (!s.sent_id.empty())
                relocation[{s.sent_id, src.second}] = {unit.id, new_id};
        }
    for (auto& sent : result.dependency.sentences)
        for (auto& t : sent.tokens) {
            auto value = kv_get(t.misc, "Backchannel");
            if (!value) continue;
            auto ptr = BackchannelPointer::parse(*value);
            if (!ptr) continue;
            auto it = relocation.find({ptr->target_sent_id, ptr->target_tok_id});
            if (it == relocation.end()) continue;
            kv_set(t.misc, "Backchannel",
                   BackchannelPointer{it->second.first, it->second.second}.str());
        }

    result.intermediate.reindex();
    result.dependency.reindex();
    return result;
}

}  // namespace coco
