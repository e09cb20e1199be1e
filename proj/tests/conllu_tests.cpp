#include <doctest.h>

#include <sstream>

#include "coconstruct/conllu.hpp"
#include "testutil.hpp"

using namespace coco;

TEST_CASE("three-token sentence parses into one sentence") {
    std::string input =
        "# sent_id = s1\n"
        "# text = ab cd ef\n"
        "1\tab\tab\tNOUN\t_\t_\t0\troot\t_\t_\n"
        "2\tcd\tcd\tNOUN\t_\t_\t1\tdep\t_\t_\n"
        "3\tef\tef\tNOUN\t_\t_\t1\tdep\t_\t_\n";
    Document doc = parse_document(input);
    REQUIRE(doc.sentences.size() == 1);
    CHECK(doc.sentences[0].sent_id == "s1");
    CHECK(doc.sentences[0].text == "ab cd ef");
    CHECK(doc.sentences[0].tokens.size() == 3);
    CHECK(doc.by_id("s1") == &doc.sentences[0]);
}

TEST_CASE("misc keeps entries in written order") {
    std::string input =
        "# sent_id = s1\n"
        "1\tx\tx\tNOUN\t_\t_\t0\troot\t_\tCoconstruct=obl::s0::4|SpaceAfter=No\n";
    Document doc = parse_document(input);
    const KvList& misc = doc.sentences[0].tokens[0].misc;
    REQUIRE(misc.size() == 2);
    CHECK(misc[0].key == "Coconstruct");
    CHECK(misc[0].value == "obl::s0::4");
    CHECK(misc[1].key == "SpaceAfter");
    CHECK(misc[1].value == "No");
}

TEST_CASE("duplicate sent_id names the second occurrence") {
    std::string input =
        "# sent_id = a\n"
        "1\tx\tx\tX\t_\t_\t0\troot\t_\t_\n"
        "\n"
        "# sent_id = a\n"
        "1\ty\ty\tX\t_\t_\t0\troot\t_\t_\n";
    try {
        parse_document(input);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
        CHECK(std::string(e.what()).find("duplicate sent_id") != std::string::npos);
    }
}

TEST_CASE("duplicate token id is a parse error") {
    std::string input =
        "# sent_id = s1\n"
        "1\tx\tx\tX\t_\t_\t0\troot\t_\t_\n"
        "1\ty\ty\tX\t_\t_\t1\tdep\t_\t_\n";
    CHECK_THROWS_AS(parse_document(input), ParseError);
}

TEST_CASE("non-contiguous word ids are a parse error") {
    std::string input =
        "# sent_id = s1\n"
        "1\tx\tx\tX\t_\t_\t0\troot\t_\t_\n"
        "3\ty\ty\tX\t_\t_\t1\tdep\t_\t_\n";
    CHECK_THROWS_WITH_AS(parse_document(input),
                         doctest::Contains("not contiguous"), ParseError);
}

TEST_CASE("wrong column count carries the line number") {
    std::string input =
        "# sent_id = s1\n"
        "1\tx\tx\n";
    try {
        parse_document(input);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("head out of range is rejected") {
    std::string input = "1\tx\tx\tX\t_\t_\t4\tdep\t_\t_\n";
    CHECK_THROWS_WITH_AS(parse_document(input), doctest::Contains("out of range"),
                         ParseError);
}

TEST_CASE("round-trip is byte-identical over the fixture suite") {
    for (const auto& path : testutil::fixture_files()) {
        CAPTURE(path);
        std::string original = testutil::read_file(path);
        Document doc = parse_file(path);
        CHECK(serialize_document(doc) == testutil::normalize(original));
    }
}

TEST_CASE("CRLF input is accepted and normalized to LF") {
    std::string input =
        "# sent_id = s1\r\n"
        "1\tx\tx\tX\t_\t_\t0\troot\t_\t_\r\n";
    Document doc = parse_document(input);
    REQUIRE(doc.sentences.size() == 1);
    std::string out = serialize_document(doc);
    CHECK(out.find('\r') == std::string::npos);
    CHECK(out ==
          "# sent_id = s1\n"
          "1\tx\tx\tX\t_\t_\t0\troot\t_\t_\n\n");
}

TEST_CASE("programmatic feats serialize as Key=Value") {
    Document doc;
    Sentence s;
    s.comments.push_back("# sent_id = gen");
    Token t;
    t.id = {RowKind::Word, 1, 0};
    t.form = "word";
    t.lemma = "word";
    t.upos = "NOUN";
    t.feats.push_back({"Number", "Sing", true});
    t.head = 0;
    t.deprel = "root";
    s.tokens.push_back(t);
    doc.sentences.push_back(s);
    std::string out = serialize_document(doc);
    CHECK(out ==
          "# sent_id = gen\n"
          "1\tword\tword\tNOUN\t_\tNumber=Sing\t0\troot\t_\t_\n\n");
}

TEST_CASE("raw misc segments survive a round-trip") {
    std::string input =
        "1\tx\tx\tX\t_\t_\t0\troot\t_\tRawFlag|SpaceAfter=No|K=a=b\n";
    Document doc = parse_document(input);
    const KvList& misc = doc.sentences[0].tokens[0].misc;
    REQUIRE(misc.size() == 3);
    CHECK_FALSE(misc[0].has_value);
    CHECK(misc[0].key == "RawFlag");
    CHECK(misc[2].value == "a=b");
    CHECK(serialize_document(doc) == testutil::normalize(input));
}

TEST_CASE("token id kinds") {
    auto word = TokenId::parse("7");
    REQUIRE(word);
    CHECK(word->kind == RowKind::Word);
    auto range = TokenId::parse("2-4");
    REQUIRE(range);
    CHECK(range->kind == RowKind::Range);
    CHECK(range->index == 2);
    CHECK(range->sub == 4);
    auto empty = TokenId::parse("5.1");
    REQUIRE(empty);
    CHECK(empty->kind == RowKind::Empty);
    CHECK_FALSE(TokenId::parse("01"));
    CHECK_FALSE(TokenId::parse("1-"));
    CHECK_FALSE(TokenId::parse("a"));
    for (const char* s : {"3", "2-4", "5.1", "0"}) {
        auto id = TokenId::parse(s);
        REQUIRE(id);
        CHECK(id->str() == s);
    }
}

TEST_CASE("deps column round-trips and keeps label subtypes") {
    std::string input =
        "1\tx\tx\tX\t_\t_\t0\troot\t0:root|2:obl:tmod\t_\n"
        "2\ty\ty\tX\t_\t_\t1\tdep\t1:dep\t_\n";
    Document doc = parse_document(input);
    const Token& t = doc.sentences[0].tokens[0];
    REQUIRE(t.deps.size() == 2);
    CHECK(t.deps[1].label == "obl:tmod");
    CHECK(serialize_document(doc) == testutil::normalize(input));
}

TEST_CASE("rebuild_text honors ranges and SpaceAfter") {
    Document doc = parse_file(testutil::fixture_path("mwt_basic.conllu"));
    CHECK(rebuild_text(doc.sentences[0]) == "vado al mare");
    Document raw = parse_file(testutil::fixture_path("raw_misc.conllu"));
    CHECK(rebuild_text(raw.sentences[0]) == "hello_ world");
}

TEST_CASE("empty document round-trips to nothing") {
    Document doc = parse_document(std::string(""));
    CHECK(doc.sentences.empty());
    CHECK(serialize_document(doc).empty());
}

TEST_CASE("order preservation: serialize(parse(x)) twice is stable") {
    for (const auto& path : testutil::fixture_files(false)) {
        std::string once = serialize_document(parse_file(path));
        std::string twice = serialize_document(parse_document(once));
        CHECK(once == twice);
    }
}
