#include <doctest.h>

#include <sstream>

#include "rcprobe/conllu.hpp"
#include "rcprobe/error.hpp"

using namespace rcprobe;
using extraction::kRootHead;

namespace {

const char* kSample =
    "# sent_id = 1\n"
    "1\tShe\tshe\tPRON\t_\t_\t2\tnsubj\t_\t_\n"
    "2\tate\teat\tVERB\t_\t_\t0\troot\t_\t_\n"
    "3\tan\tan\tDET\t_\t_\t4\tdet\t_\t_\n"
    "4\tapple\tapple\tNOUN\t_\t_\t2\tobj\t_\t_\n"
    "5\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_\n"
    "\n"
    "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
    "1\tdo\tdo\tAUX\t_\t_\t3\taux\t_\t_\n"
    "2\tn't\tnot\tPART\t_\t_\t3\tadvmod\t_\t_\n"
    "3\tgo\tgo\tVERB\t_\t_\t0\troot\t_\t_\n";

} // namespace

TEST_CASE("reads sentences, skips comments and multiword ranges") {
    std::istringstream in(kSample);
    auto sentences = extraction::read_conllu(in, "test");
    REQUIRE(sentences.size() == 2);
    CHECK(sentences[0].tokens.size() == 5);
    CHECK(sentences[0].tokens[0].surface == "She");
    CHECK(sentences[0].tokens[0].lemma == "she");
    CHECK(sentences[0].tokens[0].head == 1);
    CHECK(sentences[0].tokens[1].head == kRootHead);
    CHECK(sentences[1].tokens.size() == 3);
    CHECK(sentences[1].tokens[0].surface == "do");
}

TEST_CASE("rejects malformed lines") {
    std::istringstream short_cols("1\tword\tlemma\n");
    CHECK_THROWS_AS(extraction::read_conllu(short_cols, "t"), ValidationError);
    std::istringstream bad_id("7\tword\tlemma\t_\t_\t_\t0\troot\t_\t_\n");
    CHECK_THROWS_AS(extraction::read_conllu(bad_id, "t"), ValidationError);
}

TEST_CASE("alignment derives char spans, tolerating contraction splits") {
    std::istringstream in(kSample);
    auto parses = extraction::read_conllu(in, "test");
    std::vector<std::string> texts{"She ate an apple.", "don't go"};
    auto sentences = extraction::align_corpus(texts, parses, "test");
    REQUIRE(sentences.size() == 2);
    CHECK(sentences[0].tokens[3].begin == 11);
    CHECK(sentences[0].tokens[3].end == 16);
    CHECK(sentences[0].tokens[4].begin == 16); // "." hugs "apple"
    CHECK(sentences[1].tokens[0].surface == "do");
    CHECK(sentences[1].tokens[1].begin == 2); // "n't" directly after "do"
    CHECK(sentences[1].root == 2);
}

TEST_CASE("alignment failures and count mismatches are validation errors") {
    std::istringstream in(kSample);
    auto parses = extraction::read_conllu(in, "test");
    std::vector<std::string> wrong_text{"She ate an orange.", "don't go"};
    CHECK_THROWS_AS(extraction::align_corpus(wrong_text, parses, "t"), ValidationError);
    std::vector<std::string> too_few{"She ate an apple."};
    CHECK_THROWS_AS(extraction::align_corpus(too_few, parses, "t"), ValidationError);
}

TEST_CASE("tree validation rejects cycles and multiple roots") {
    using extraction::Token;
    std::vector<Token> cyclic{{"a", "a", 1, "dep", 0, 0},
                              {"b", "b", 0, "dep", 0, 0},
                              {"c", "c", kRootHead, "root", 0, 0}};
    CHECK_THROWS_AS(extraction::make_parsed_sentence("a b c", cyclic, "t"), ValidationError);

    std::vector<Token> two_roots{{"a", "a", kRootHead, "root", 0, 0},
                                 {"b", "b", kRootHead, "root", 0, 0}};
    CHECK_THROWS_AS(extraction::make_parsed_sentence("a b", two_roots, "t"), ValidationError);

    std::vector<Token> self{{"a", "a", kRootHead, "root", 0, 0}, {"b", "b", 1, "dep", 0, 0}};
    CHECK_THROWS_AS(extraction::make_parsed_sentence("a b", self, "t"), ValidationError);
}

TEST_CASE("subtree collects descendants in ascending order") {
    using extraction::Token;
    // "the cat that slept purred": purred is root, slept is relcl on cat.
    std::vector<Token> toks{{"the", "the", 1, "det", 0, 0},
                            {"cat", "cat", 4, "nsubj", 0, 0},
                            {"that", "that", 3, "nsubj", 0, 0},
                            {"slept", "sleep", 1, "relcl", 0, 0},
                            {"purred", "purr", kRootHead, "root", 0, 0}};
    auto s = extraction::make_parsed_sentence("the cat that slept purred", toks, "t");
    CHECK(s.subtree(3) == std::vector<int>{2, 3});
    CHECK(s.subtree(1) == std::vector<int>{0, 1, 2, 3});
    CHECK(s.subtree(4) == std::vector<int>{0, 1, 2, 3, 4});
}
