#include "coconstruct/conllu.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace coco {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isdigit(c); });
}

// Rejects leading zeros so that parse/str stay inverse of each other.
std::optional<int> parse_index(std::string_view s) {
    if (!all_digits(s)) return std::nullopt;
    if (s.size() > 1 && s[0] == '0') return std::nullopt;
    if (s.size() > 9) return std::nullopt;
    int v = 0;
    for (char c : s) v = v * 10 + (c - '0');
    return v;
}

KvList parse_kv_column(std::string_view col) {
    KvList out;
    if (col == "_") return out;
    for (std::string_view seg : split(col, '|')) {
        std::size_t eq = seg.find('=');
        if (eq == std::string_view::npos) {
            out.push_back({std::string(seg), "", false});
        } else {
            out.push_back({std::string(seg.substr(0, eq)),
                           std::string(seg.substr(eq + 1)), true});
        }
    }
    return out;
}

std::string kv_column(const KvList& kv) {
    if (kv.empty()) return "_";
    std::string out;
    for (std::size_t i = 0; i < kv.size(); ++i) {
        if (i) out += '|';
        out += kv[i].str();
    }
    return out;
}

std::vector<DepsEntry> parse_deps_column(std::string_view col, std::size_t lineno) {
    std::vector<DepsEntry> out;
    if (col == "_") return out;
    for (std::string_view seg : split(col, '|')) {
        std::size_t colon = seg.find(':');
        if (colon == std::string_view::npos || colon == 0 || colon + 1 >= seg.size())
            throw ParseError(lineno, "malformed DEPS entry '" + std::string(seg) + "'");
        auto head = TokenId::parse(seg.substr(0, colon));
        if (!head || head->kind == RowKind::Range)
            throw ParseError(lineno, "malformed DEPS head in '" + std::string(seg) + "'");
        out.push_back({*head, std::string(seg.substr(colon + 1))});
    }
    return out;
}

std::string deps_column(const std::vector<DepsEntry>& deps) {
    if (deps.empty()) return "_";
    std::string out;
    for (std::size_t i = 0; i < deps.size(); ++i) {
        if (i) out += '|';
        out += deps[i].head.str() + ":" + deps[i].label;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string TokenId::str() const {
    switch (kind) {
        case RowKind::Word:
            return std::to_string(index);
        case RowKind::Range:
            return std::to_string(index) + "-" + std::to_string(sub);
        case RowKind::Empty:
            return std::to_string(index) + "." + std::to_string(sub);
    }
    return {};
}

std::optional<TokenId> TokenId::parse(std::string_view s) {
    std::size_t dash = s.find('-');
    std::size_t dot = s.find('.');
    if (dash != std::string_view::npos) {
        auto a = parse_index(s.substr(0, dash));
        auto b = parse_index(s.substr(dash + 1));
        if (!a || !b) return std::nullopt;
        return TokenId{RowKind::Range, *a, *b};
    }
    if (dot != std::string_view::npos) {
        auto a = parse_index(s.substr(0, dot));
        auto b = parse_index(s.substr(dot + 1));
        if (!a || !b || *b == 0) return std::nullopt;
        return TokenId{RowKind::Empty, *a, *b};
    }
    auto a = parse_index(s);
    if (!a) return std::nullopt;
    return TokenId{RowKind::Word, *a, 0};
}

bool TokenId::operator<(const TokenId& o) const {
    if (index != o.index) return index < o.index;
    return sub < o.sub;
}

const KvEntry* kv_find(const KvList& kv, std::string_view key) {
    for (const auto& e : kv)
        if (e.has_value && e.key == key) return &e;
    return nullptr;
}

std::optional<std::string> kv_get(const KvList& kv, std::string_view key) {
    if (const KvEntry* e = kv_find(kv, key)) return e->value;
    return std::nullopt;
}

int kv_count(const KvList& kv, std::string_view key) {
    int n = 0;
    for (const auto& e : kv)
        if (e.has_value && e.key == key) ++n;
    return n;
}

void kv_set(KvList& kv, std::string_view key, std::string_view value) {
    for (auto& e : kv) {
        if (e.has_value && e.key == key) {
            e.value = std::string(value);
            return;
        }
    }
    kv.push_back({std::string(key), std::string(value), true});
}

int kv_erase(KvList& kv, std::string_view key) {
    int before = static_cast<int>(kv.size());
    kv.erase(std::remove_if(kv.begin(), kv.end(),
                            [&](const KvEntry& e) {
                                return e.has_value && e.key == key;
                            }),
             kv.end());
    return before - static_cast<int>(kv.size());
}

const Token* Sentence::word(int id) const {
    for (const auto& t : tokens)
        if (t.id.kind == RowKind::Word && t.id.index == id) return &t;
    return nullptr;
}

Token* Sentence::word(int id) {
    return const_cast<Token*>(static_cast<const Sentence*>(this)->word(id));
}

int Sentence::word_count() const {
    int n = 0;
    for (const auto& t : tokens)
        if (t.is_word()) ++n;
    return n;
}

const Sentence* Document::by_id(const std::string& sent_id) const {
    auto it = sent_index.find(sent_id);
    if (it == sent_index.end()) return nullptr;
    return &sentences[static_cast<std::size_t>(it->second)];
}

void Document::reindex() {
    sent_index.clear();
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        sentences[i].document_position = static_cast<int>(i);
        if (!sentences[i].sent_id.empty())
            sent_index.emplace(sentences[i].sent_id, static_cast<int>(i));
    }
}

bool is_comment_for_key(std::string_view comment, std::string_view key) {
    if (comment.empty() || comment[0] != '#') return false;
    std::string_view rest = comment.substr(1);
    while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) rest.remove_prefix(1);
    if (rest.substr(0, key.size()) != key) return false;
    rest.remove_prefix(key.size());
    while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t')) rest.remove_prefix(1);
    return !rest.empty() && rest.front() == '=';
}

namespace {

std::optional<std::string> comment_value_of(std::string_view comment, std::string_view key) {
    if (!is_comment_for_key(comment, key)) return std::nullopt;
    std::string_view rest = comment.substr(comment.find('=') + 1);
    return std::string(trim(rest));
}

}  // namespace

std::optional<std::string> comment_value(const Sentence& sent, std::string_view key) {
    for (const auto& c : sent.comments)
        if (auto v = comment_value_of(c, key)) return v;
    return std::nullopt;
}

std::string rebuild_text(const Sentence& sent) {
    std::string out;
    bool pending_space = false;
    int skip_words_until = 0;  // word ids covered by the last range row
    for (const auto& t : sent.tokens) {
        if (t.id.kind == RowKind::Empty) continue;
        if (t.id.kind == RowKind::Word && t.id.index <= skip_words_until) continue;
        if (pending_space) out += ' ';
        out += t.form;
        pending_space = kv_get(t.misc, "SpaceAfter") != std::optional<std::string>("No");
        if (t.id.kind == RowKind::Range) skip_words_until = t.id.sub;
    }
    return out;
}

namespace {

struct SentenceBuilder {
    Sentence sent;
    std::size_t first_line = 0;
    std::size_t sent_id_line = 0;
    std::vector<std::size_t> token_lines;
    std::unordered_map<std::string, std::size_t> seen_ids;

    bool started() const { return first_line != 0; }

    void finish() {
        // Word ids must be exactly 1..n, in order.
        int expected = 1;
        for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
            const Token& t = sent.tokens[i];
            if (!t.is_word()) continue;
            if (t.id.index != expected)
                throw ParseError(token_lines[i],
                                 "word ids are not contiguous: expected " +
                                     std::to_string(expected) + ", found " +
                                     t.id.str());
            ++expected;
        }
        int n = expected - 1;
        if (n == 0)
            throw ParseError(first_line, "sentence contains no token rows");
        for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
            const Token& t = sent.tokens[i];
            if (t.is_word() && t.head && *t.head > n)
                throw ParseError(token_lines[i],
                                 "head " + std::to_string(*t.head) +
                                     " out of range (sentence has " +
                                     std::to_string(n) + " words)");
            if (t.id.kind == RowKind::Range &&
                (t.id.index > t.id.sub || t.id.sub > n))
                throw ParseError(token_lines[i],
                                 "invalid multiword range " + t.id.str());
        }
    }
};

Token parse_token_row(const std::vector<std::string_view>& cols, std::size_t lineno) {
    Token t;
    auto id = TokenId::parse(cols[0]);
    if (!id) throw ParseError(lineno, "malformed token id '" + std::string(cols[0]) + "'");
    t.id = *id;
    for (const auto& col : cols)
        if (col.empty()) throw ParseError(lineno, "empty column");
    t.form = std::string(cols[1]);
    t.lemma = std::string(cols[2]);
    t.upos = cols[3] == "_" ? "" : std::string(cols[3]);
    t.xpos = cols[4] == "_" ? "" : std::string(cols[4]);
    t.feats = parse_kv_column(cols[5]);
    if (cols[6] == "_") {
        t.head = std::nullopt;
    } else {
        auto h = parse_index(cols[6]);
        if (!h) throw ParseError(lineno, "malformed head '" + std::string(cols[6]) + "'");
        t.head = *h;
    }
    if (t.id.kind != RowKind::Word && t.head)
        throw ParseError(lineno, "non-word row " + t.id.str() + " must have head '_'");
    t.deprel = cols[7] == "_" ? "" : std::string(cols[7]);
    t.deps = parse_deps_column(cols[8], lineno);
    t.misc = parse_kv_column(cols[9]);
    return t;
}

}  // namespace

Document parse_document(std::istream& in) {
    Document doc;
    SentenceBuilder cur;
    std::unordered_map<std::string, std::size_t> sent_id_lines;
    std::size_t lineno = 0;
    std::string line;

    auto flush = [&]() {
        if (!cur.started()) return;
        cur.finish();
        if (!cur.sent.sent_id.empty()) {
            auto [it, inserted] =
                sent_id_lines.emplace(cur.sent.sent_id, cur.sent_id_line);
            if (!inserted)
                throw ParseError(cur.sent_id_line,
                                 "duplicate sent_id '" + cur.sent.sent_id +
                                     "' (first seen at line " +
                                     std::to_string(it->second) + ")");
        }
        cur.sent.document_position = static_cast<int>(doc.sentences.size());
        doc.sentences.push_back(std::move(cur.sent));
        cur = SentenceBuilder{};
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        if (!cur.started()) cur.first_line = lineno;
        if (line[0] == '#') {
            if (auto v = comment_value_of(line, "sent_id")) {
                cur.sent.sent_id = *v;
                cur.sent_id_line = lineno;
            } else if (auto tv = comment_value_of(line, "text")) {
                cur.sent.text = *tv;
            }
            cur.sent.comments.push_back(line);
            continue;
        }
        auto cols = split(line, '\t');
        if (cols.size() != 10)
            throw ParseError(lineno, "expected 10 tab-separated columns, found " +
                                         std::to_string(cols.size()));
        Token tok = parse_token_row(cols, lineno);
        std::string id_str = tok.id.str();
        auto [it, inserted] = cur.seen_ids.emplace(id_str, lineno);
        if (!inserted)
            throw ParseError(lineno, "duplicate token id '" + id_str + "'");
        cur.token_lines.push_back(lineno);
        cur.sent.tokens.push_back(std::move(tok));
    }
    flush();
    doc.reindex();
    return doc;
}

Document parse_document(const std::string& text) {
    std::istringstream in(text);
    return parse_document(in);
}

Document parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return parse_document(in);
}

void serialize_document(const Document& doc, std::ostream& out) {
    for (const auto& sent : doc.sentences) {
        for (const auto& c : sent.comments) out << c << '\n';
        for (const auto& t : sent.tokens) {
            out << t.id.str() << '\t' << t.form << '\t' << t.lemma << '\t'
                << (t.upos.empty() ? "_" : t.upos) << '\t'
                << (t.xpos.empty() ? "_" : t.xpos) << '\t'
                << kv_column(t.feats) << '\t'
                << (t.head ? std::to_string(*t.head) : "_") << '\t'
                << (t.deprel.empty() ? "_" : t.deprel) << '\t'
                << deps_column(t.deps) << '\t' << kv_column(t.misc) << '\n';
        }
        out << '\n';
    }
}

std::string serialize_document(const Document& doc) {
    std::ostringstream out;
    serialize_document(doc, out);
    return out.str();
}

}  // namespace coco
