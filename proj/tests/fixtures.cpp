#include "fixtures.hpp"

#include <fstream>

#include "rcprobe/error.hpp"
#include "rcprobe/text.hpp"

namespace rcprobe::testfix {

using extraction::ParsedSentence;
using extraction::RelativizerForm;
using extraction::Token;

ParsedSentence sentence(const std::string& text, const std::vector<Tok>& tokens) {
    std::vector<Token> toks;
    toks.reserve(tokens.size());
    for (const Tok& t : tokens) {
        Token tok;
        tok.surface = t.surface;
        tok.lemma = text::to_lower(t.surface);
        tok.head = t.head == 0 ? extraction::kRootHead : t.head - 1;
        tok.deprel = t.deprel;
        toks.push_back(std::move(tok));
    }
    return extraction::make_parsed_sentence(text, std::move(toks), "fixture");
}

std::vector<ParadigmFixture> paradigm_fixtures() {
    std::vector<ParadigmFixture> out;

    out.push_back({sentence("Katrina Haus was a woman who sought to attract stares, not turn them away.",
                            {{"Katrina", 2, "compound"},
                             {"Haus", 3, "nsubj"},
                             {"was", 0, "ROOT"},
                             {"a", 5, "det"},
                             {"woman", 3, "attr"},
                             {"who", 7, "nsubj"},
                             {"sought", 5, "relcl"},
                             {"to", 9, "aux"},
                             {"attract", 7, "xcomp"},
                             {"stares", 9, "dobj"},
                             {",", 7, "punct"},
                             {"not", 13, "neg"},
                             {"turn", 9, "conj"},
                             {"them", 13, "dobj"},
                             {"away", 13, "advmod"},
                             {".", 3, "punct"}}),
                   true, true, true, RelativizerForm::who, "woman"});

    out.push_back({sentence("Two people who I loved very much have left me .",
                            {{"Two", 2, "nummod"},
                             {"people", 9, "nsubj"},
                             {"who", 5, "dobj"},
                             {"I", 5, "nsubj"},
                             {"loved", 2, "relcl"},
                             {"very", 7, "advmod"},
                             {"much", 5, "advmod"},
                             {"have", 9, "aux"},
                             {"left", 0, "ROOT"},
                             {"me", 9, "dobj"},
                             {".", 9, "punct"}}),
                   true, true, false, RelativizerForm::who, "people"});

    out.push_back({sentence("Buck , who was snoozing over in the corner , woke up and looked around.",
                            {{"Buck", 11, "nsubj"},
                             {",", 5, "punct"},
                             {"who", 5, "nsubj"},
                             {"was", 5, "aux"},
                             {"snoozing", 1, "relcl"},
                             {"over", 5, "advmod"},
                             {"in", 5, "prep"},
                             {"the", 9, "det"},
                             {"corner", 7, "pobj"},
                             {",", 5, "punct"},
                             {"woke", 0, "ROOT"},
                             {"up", 11, "prt"},
                             {"and", 11, "cc"},
                             {"looked", 11, "conj"},
                             {"around", 14, "advmod"},
                             {".", 11, "punct"}}),
                   true, false, true, RelativizerForm::who, "Buck"});

    out.push_back({sentence("Sally turned with a welcoming grin , expecting to see Gus , whom she liked a lot.",
                            {{"Sally", 2, "nsubj"},
                             {"turned", 0, "ROOT"},
                             {"with", 2, "prep"},
                             {"a", 6, "det"},
                             {"welcoming", 6, "amod"},
                             {"grin", 3, "pobj"},
                             {",", 2, "punct"},
                             {"expecting", 2, "advcl"},
                             {"to", 10, "aux"},
                             {"see", 8, "xcomp"},
                             {"Gus", 10, "dobj"},
                             {",", 15, "punct"},
                             {"whom", 15, "dobj"},
                             {"she", 15, "nsubj"},
                             {"liked", 11, "relcl"},
                             {"a", 17, "det"},
                             {"lot", 15, "npadvmod"},
                             {".", 2, "punct"}}),
                   true, false, false, RelativizerForm::whom, "Gus"});

    out.push_back({sentence("One is a rather, um, disconcerting bit of information which has reached my ears.",
                            {{"One", 2, "nsubj"},
                             {"is", 0, "ROOT"},
                             {"a", 9, "det"},
                             {"rather", 8, "advmod"},
                             {",", 8, "punct"},
                             {"um", 8, "intj"},
                             {",", 8, "punct"},
                             {"disconcerting", 9, "amod"},
                             {"bit", 2, "attr"},
                             {"of", 9, "prep"},
                             {"information", 10, "pobj"},
                             {"which", 14, "nsubj"},
                             {"has", 14, "aux"},
                             {"reached", 9, "relcl"},
                             {"my", 16, "poss"},
                             {"ears", 14, "dobj"},
                             {".", 2, "punct"}}),
                   false, true, true, RelativizerForm::which, "bit"});

    out.push_back({sentence("She pulls out a course catalog, various forms, and a letter which she hands to Kevin.",
                            {{"She", 2, "nsubj"},
                             {"pulls", 0, "ROOT"},
                             {"out", 2, "prt"},
                             {"a", 6, "det"},
                             {"course", 6, "compound"},
                             {"catalog", 2, "dobj"},
                             {",", 6, "punct"},
                             {"various", 9, "amod"},
                             {"forms", 6, "conj"},
                             {",", 6, "punct"},
                             {"and", 6, "cc"},
                             {"a", 13, "det"},
                             {"letter", 6, "conj"},
                             {"which", 16, "dobj"},
                             {"she", 16, "nsubj"},
                             {"hands", 13, "relcl"},
                             {"to", 16, "prep"},
                             {"Kevin", 17, "pobj"},
                             {".", 2, "punct"}}),
                   false, true, false, RelativizerForm::which, "letter"});

    out.push_back({sentence("I never saw a penny in royalties, which was all right with me.",
                            {{"I", 3, "nsubj"},
                             {"never", 3, "neg"},
                             {"saw", 0, "ROOT"},
                             {"a", 5, "det"},
                             {"penny", 3, "dobj"},
                             {"in", 5, "prep"},
                             {"royalties", 6, "pobj"},
                             {",", 10, "punct"},
                             {"which", 10, "nsubj"},
                             {"was", 7, "relcl"},
                             {"all", 12, "advmod"},
                             {"right", 10, "acomp"},
                             {"with", 10, "prep"},
                             {"me", 13, "pobj"},
                             {".", 3, "punct"}}),
                   false, false, true, RelativizerForm::which, "royalties"});

    out.push_back({sentence("Lyric clips her Walkman to her fanny pack, which she wears pouch forward.",
                            {{"Lyric", 2, "nsubj"},
                             {"clips", 0, "ROOT"},
                             {"her", 4, "poss"},
                             {"Walkman", 2, "dobj"},
                             {"to", 2, "prep"},
                             {"her", 8, "poss"},
                             {"fanny", 8, "compound"},
                             {"pack", 5, "pobj"},
                             {",", 12, "punct"},
                             {"which", 12, "dobj"},
                             {"she", 12, "nsubj"},
                             {"wears", 8, "relcl"},
                             {"pouch", 12, "npadvmod"},
                             {"forward", 12, "advmod"},
                             {".", 2, "punct"}}),
                   false, false, false, RelativizerForm::which, "pack"});

    return out;
}

namespace {

const std::vector<std::string>& animate_nouns() {
    static const std::vector<std::string> kNouns{"woman",  "man",    "teacher", "doctor",
                                                 "singer", "farmer", "soldier", "nurse"};
    return kNouns;
}

const std::vector<std::string>& inanimate_nouns() {
    static const std::vector<std::string> kNouns{"letter", "book",  "idea",  "house",
                                                 "song",   "stone", "plan",  "report"};
    return kNouns;
}

const std::vector<std::string>& transitive_verbs() {
    static const std::vector<std::string> kVerbs{"praised", "reached", "worried", "surprised",
                                                 "impressed", "annoyed"};
    return kVerbs;
}

const std::vector<std::string>& object_verbs() {
    static const std::vector<std::string> kVerbs{"wrote", "admired", "saw", "remembered",
                                                 "described", "trusted"};
    return kVerbs;
}

const std::vector<std::string>& main_verbs() {
    static const std::vector<std::string> kVerbs{"vanished", "smiled", "waited", "appeared",
                                                 "mattered", "remained"};
    return kVerbs;
}

// Subject RC: "The N REL V the M V2 ." / non-restrictive with commas.
ParsedSentence subject_rc(const std::string& noun, const std::string& rel, const std::string& verb,
                          const std::string& obj, const std::string& main_verb, bool restrictive) {
    if (restrictive) {
        std::string text = "The " + noun + " " + rel + " " + verb + " the " + obj + " " + main_verb + " .";
        return sentence(text, {{"The", 2, "det"},
                               {noun.c_str(), 7, "nsubj"},
                               {rel.c_str(), 4, "nsubj"},
                               {verb.c_str(), 2, "relcl"},
                               {"the", 6, "det"},
                               {obj.c_str(), 4, "dobj"},
                               {main_verb.c_str(), 0, "ROOT"},
                               {".", 7, "punct"}});
    }
    std::string text =
        "The " + noun + " , " + rel + " " + verb + " the " + obj + " , " + main_verb + " .";
    return sentence(text, {{"The", 2, "det"},
                           {noun.c_str(), 9, "nsubj"},
                           {",", 5, "punct"},
                           {rel.c_str(), 5, "nsubj"},
                           {verb.c_str(), 2, "relcl"},
                           {"the", 7, "det"},
                           {obj.c_str(), 5, "dobj"},
                           {",", 5, "punct"},
                           {main_verb.c_str(), 0, "ROOT"},
                           {".", 9, "punct"}});
}

// Object RC: "The N REL she V yesterday V2 ." / non-restrictive variant.
ParsedSentence object_rc(const std::string& noun, const std::string& rel, const std::string& verb,
                         const std::string& main_verb, bool restrictive) {
    if (restrictive) {
        std::string text = "The " + noun + " " + rel + " she " + verb + " yesterday " + main_verb + " .";
        return sentence(text, {{"The", 2, "det"},
                               {noun.c_str(), 7, "nsubj"},
                               {rel.c_str(), 5, "dobj"},
                               {"she", 5, "nsubj"},
                               {verb.c_str(), 2, "relcl"},
                               {"yesterday", 5, "advmod"},
                               {main_verb.c_str(), 0, "ROOT"},
                               {".", 7, "punct"}});
    }
    std::string text =
        "The " + noun + " , " + rel + " she " + verb + " yesterday , " + main_verb + " .";
    return sentence(text, {{"The", 2, "det"},
                           {noun.c_str(), 9, "nsubj"},
                           {",", 6, "punct"},
                           {rel.c_str(), 6, "dobj"},
                           {"she", 6, "nsubj"},
                           {verb.c_str(), 2, "relcl"},
                           {"yesterday", 6, "advmod"},
                           {",", 6, "punct"},
                           {main_verb.c_str(), 0, "ROOT"},
                           {".", 9, "punct"}});
}

// No relative clause at all; still passes the single-pronoun filter when it
// carries "that" as a determiner.
ParsedSentence no_rc_sentence(const std::string& noun) {
    std::string text = "She kept that " + noun + " .";
    return sentence(text, {{"She", 2, "nsubj"},
                           {"kept", 0, "ROOT"},
                           {"that", 4, "det"},
                           {noun.c_str(), 2, "dobj"},
                           {".", 2, "punct"}});
}

} // namespace

std::vector<ParsedSentence> synthetic_corpus(const SynthOptions& opts) {
    text::Rng rng(opts.seed);
    std::vector<ParsedSentence> out;
    out.reserve(opts.count);
    // The "star" lemma is attested with both who and which, so that-RCs over
    // it must be discarded by the animacy rules.
    const std::string ambiguous = "star";
    std::size_t i = 0;
    while (out.size() < opts.count) {
        std::size_t idx = i++;
        bool animate = (idx % 8) < 4;
        bool restrictive = (idx % 4) < 2;
        bool subjrc = (idx % 2) == 0;

        if (opts.include_discards && idx % 23 == 22) {
            out.push_back(no_rc_sentence(inanimate_nouns()[rng.bounded(inanimate_nouns().size())]));
            continue;
        }

        std::string noun = animate ? animate_nouns()[rng.bounded(animate_nouns().size())]
                                   : inanimate_nouns()[rng.bounded(inanimate_nouns().size())];
        if (idx % 19 == 18) noun = ambiguous;

        std::string rel = animate ? "who" : "which";
        if (opts.include_that && restrictive && idx % 5 == 4) rel = "that";
        if (opts.include_whom && animate && !subjrc && idx % 7 == 6) rel = "whom";
        if (opts.include_discards && idx % 31 == 30) rel = "whose"; // discarded after extraction

        std::string main_verb = main_verbs()[rng.bounded(main_verbs().size())];
        if (subjrc) {
            std::string verb = transitive_verbs()[rng.bounded(transitive_verbs().size())];
            std::string obj = inanimate_nouns()[rng.bounded(inanimate_nouns().size())];
            if (rel == "whose") continue; // whose is not a bare subject relativizer
            out.push_back(subject_rc(noun, rel, verb, obj, main_verb, restrictive));
        } else {
            std::string verb = object_verbs()[rng.bounded(object_verbs().size())];
            out.push_back(object_rc(noun, rel, verb, main_verb, restrictive));
        }
    }
    return out;
}

std::string conllu_of(const ParsedSentence& s) {
    std::string out;
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
        const Token& t = s.tokens[i];
        out += std::to_string(i + 1) + "\t" + t.surface + "\t" + t.lemma + "\t_\t_\t_\t" +
               std::to_string(t.head == extraction::kRootHead ? 0 : t.head + 1) + "\t" + t.deprel +
               "\t_\t_\n";
    }
    out += "\n";
    return out;
}

void write_corpus_files(const std::vector<ParsedSentence>& sentences,
                        const std::string& corpus_path, const std::string& conllu_path) {
    std::ofstream corpus(corpus_path, std::ios::binary);
    std::ofstream conllu(conllu_path, std::ios::binary);
    if (!corpus || !conllu) throw ValidationError("cannot write fixture corpus files");
    for (const ParsedSentence& s : sentences) {
        corpus << s.text << "\n";
        conllu << conllu_of(s);
    }
}

} // namespace rcprobe::testfix
