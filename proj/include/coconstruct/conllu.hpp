// conllu.hpp - CoNLL-U document model with a byte-exact round-trip
// parser and serializer.

#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace coco {

/// The three kinds of rows a CoNLL-U sentence can contain.
enum class RowKind { Word, Range, Empty };

/// Token index as written in column 1: a word id (`4`), a multiword-token
/// range (`4-5`), or an empty-node id (`4.1`).
struct TokenId {
    RowKind kind = RowKind::Word;
    int index = 0;  // word id, range start, or empty-node anchor
    int sub = 0;    // range end (Range) or decimal part (Empty)

    std::string str() const;
    static std::optional<TokenId> parse(std::string_view s);
    bool operator==(const TokenId&) const = default;
    bool operator<(const TokenId& o) const;
};

/// One `|`-separated segment of FEATS or MISC. Segments without `=` are
/// kept raw in `key` so they survive round-trips.
struct KvEntry {
    std::string key;
    std::string value;
    bool has_value = true;

    std::string str() const { return has_value ? key + "=" + value : key; }
};

using KvList = std::vector<KvEntry>;

const KvEntry* kv_find(const KvList& kv, std::string_view key);
std::optional<std::string> kv_get(const KvList& kv, std::string_view key);
int kv_count(const KvList& kv, std::string_view key);
/// Replaces the first entry with this key, or appends one.
void kv_set(KvList& kv, std::string_view key, std::string_view value);
/// Removes every entry with this key; returns how many were removed.
int kv_erase(KvList& kv, std::string_view key);

/// One edge of the enhanced graph (DEPS column): head id + relation label.
/// The label keeps everything after the first `:`, subtypes and view
/// suffixes included.
struct DepsEntry {
    TokenId head;  // Word (0 allowed) or Empty
    std::string label;
    bool operator==(const DepsEntry&) const = default;
};

/// One CoNLL-U row. FORM and LEMMA are stored verbatim (an `_` there is
/// ambiguous and must survive round-trips); for the other columns `_`
/// maps to an empty value.
struct Token {
    TokenId id;
    std::string form = "_";
    std::string lemma = "_";
    std::string upos;
    std::string xpos;
    KvList feats;
    std::optional<int> head;  // 0 = root; unset serializes as `_`
    std::string deprel;
    std::vector<DepsEntry> deps;
    KvList misc;

    bool is_word() const { return id.kind == RowKind::Word; }
};

/// A speaker-based maximal unit: one comment block plus its token rows.
/// Comments are kept verbatim; sent_id/text are conveniences extracted
/// while parsing.
struct Sentence {
    std::string sent_id;
    std::string text;
    std::vector<std::string> comments;
    std::vector<Token> tokens;
    int document_position = 0;

    const Token* word(int id) const;
    Token* word(int id);
    int word_count() const;
};

struct Document {
    std::vector<Sentence> sentences;
    std::unordered_map<std::string, int> sent_index;

    const Sentence* by_id(const std::string& sent_id) const;
    /// Rebuilds sent_index and document_position after structural edits.
    void reindex();
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what),
          line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

Document parse_document(std::istream& in);
Document parse_document(const std::string& text);
Document parse_file(const std::string& path);

void serialize_document(const Document& doc, std::ostream& out);
std::string serialize_document(const Document& doc);

/// Value of a `# key = value` comment, if present.
std::optional<std::string> comment_value(const Sentence& sent, std::string_view key);
bool is_comment_for_key(std::string_view comment, std::string_view key);

/// Sentence text recomputed from surface forms, honoring multiword-token
/// ranges and `SpaceAfter=No`.
std::string rebuild_text(const Sentence& sent);

}  // namespace coco
