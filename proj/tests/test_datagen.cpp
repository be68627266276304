#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lmeval/datagen.hpp"
#include "lmeval/error.hpp"
#include "lmeval/mock_backend.hpp"
#include "lmeval/types.hpp"
#include "support/synthetic.hpp"

namespace {

using namespace lmeval;

const std::vector<int> kSupport{1, 2, 3, 4, 5};

UnitTest sample_test() {
  UnitTest test;
  test.id = "gut-1";
  test.text = "Is the response concise?";
  return test;
}

BackendResponse text_only(std::string text) {
  BackendResponse response;
  response.text = std::move(text);
  return response;
}

}  // namespace

TEST_CASE("numbered list parsing") {
  SUBCASE("period and paren markers") {
    const auto items = parse_numbered_list(
        "1. Is it concise?\n2) Does it cite sources?\n10. Is it polite?");
    REQUIRE(items.size() == 3);
    CHECK(items[0] == "Is it concise?");
    CHECK(items[1] == "Does it cite sources?");
    CHECK(items[2] == "Is it polite?");
  }

  SUBCASE("unnumbered lines are ignored") {
    const auto items = parse_numbered_list(
        "Here are the tests:\n\n1. Is it accurate?\nThanks!\n2. Is it kind?");
    REQUIRE(items.size() == 2);
    CHECK(items[0] == "Is it accurate?");
    CHECK(items[1] == "Is it kind?");
  }

  SUBCASE("surrounding whitespace is trimmed") {
    const auto items = parse_numbered_list("  3.   Is it short?   ");
    REQUIRE(items.size() == 1);
    CHECK(items[0] == "Is it short?");
  }

  SUBCASE("empty items and bare numbers are dropped") {
    CHECK(parse_numbered_list("1.\n2.   \n3").empty());
    CHECK(parse_numbered_list("").empty());
  }
}

TEST_CASE("scored rationale parsing") {
  SUBCASE("rationale text and score split at the sentinel") {
    const auto parsed =
        parse_scored_rationale("The response stays on topic.\nScore: 4");
    REQUIRE(parsed.has_value());
    CHECK(parsed->rationale == "The response stays on topic.");
    CHECK(parsed->score == 4);
  }

  SUBCASE("last sentinel wins") {
    const auto parsed = parse_scored_rationale(
        "A naive reading gives Score: 2 but on reflection.\nScore: 5");
    REQUIRE(parsed.has_value());
    CHECK(parsed->score == 5);
    CHECK(parsed->rationale ==
          "A naive reading gives Score: 2 but on reflection.");
  }

  SUBCASE("whitespace after the sentinel is tolerated") {
    const auto parsed = parse_scored_rationale("Fine.\nScore:   3");
    REQUIRE(parsed.has_value());
    CHECK(parsed->score == 3);
  }

  SUBCASE("missing sentinel or missing integer") {
    CHECK_FALSE(parse_scored_rationale("No verdict here.").has_value());
    CHECK_FALSE(parse_scored_rationale("Score: soon").has_value());
    CHECK_FALSE(parse_scored_rationale("").has_value());
  }
}

TEST_CASE("datagen request builders") {
  const UnitTest test = sample_test();
  const Exchange exchange{"Summarize the memo.", "It says hello."};

  SUBCASE("teacher requests are deterministic text completions") {
    const auto request = build_testgen_request("Summarize the memo.", {}, 4);
    REQUIRE(request.messages.size() == 2);
    CHECK(request.messages[0].role == "system");
    CHECK(request.messages[1].role == "user");
    CHECK(request.max_tokens == 512);
    CHECK(request.temperature == 0.0);
    CHECK_FALSE(request.want_logprobs);
    CHECK(request.messages[1].content.find("Summarize the memo.") !=
          std::string::npos);
  }

  SUBCASE("testgen bounds") {
    CHECK_THROWS_AS(build_testgen_request("p", {}, 0), Error);
    const std::vector<std::string> three{"a", "b", "c"};
    CHECK_THROWS_AS(build_testgen_request("p", three, 4), Error);
  }

  SUBCASE("steering responses change the request") {
    const std::vector<std::string> steer{"An example answer."};
    const auto bare = build_testgen_request("p", {}, 4);
    const auto steered = build_testgen_request("p", steer, 4);
    CHECK(request_hash(bare) != request_hash(steered));
    CHECK(steered.messages[1].content.find("An example answer.") !=
          std::string::npos);
  }

  SUBCASE("contrastive targets must be in support") {
    CHECK_THROWS_WITH(
        build_contrastive_request("p", test, 9, kSupport),
        doctest::Contains("outside support"));
    const auto lo = build_contrastive_request("p", test, 1, kSupport);
    const auto hi = build_contrastive_request("p", test, 5, kSupport);
    CHECK(request_hash(lo) != request_hash(hi));
  }

  SUBCASE("rationale variants key distinct requests") {
    const auto v0 = build_rationale_request(test, exchange, 0, kSupport);
    const auto v1 = build_rationale_request(test, exchange, 1, kSupport);
    CHECK(request_hash(v0) != request_hash(v1));
  }

  SUBCASE("revision rounds key distinct requests") {
    const auto r0 =
        build_revision_request(test, exchange, "Weak take.", 5, 0, kSupport);
    const auto r1 =
        build_revision_request(test, exchange, "Weak take.", 5, 1, kSupport);
    CHECK(request_hash(r0) != request_hash(r1));
    CHECK_THROWS_WITH(
        build_revision_request(test, exchange, "Weak take.", 0, 0, kSupport),
        doctest::Contains("outside support"));
  }

  SUBCASE("harmonize direction matters") {
    const auto ab = build_harmonize_request(test, exchange, "other response",
                                            "mine", "theirs", kSupport);
    const auto ba = build_harmonize_request(test, exchange, "other response",
                                            "theirs", "mine", kSupport);
    CHECK(request_hash(ab) != request_hash(ba));
  }

  SUBCASE("support must be non-empty and strictly increasing") {
    const std::vector<int> empty;
    const std::vector<int> unsorted{3, 2};
    CHECK_THROWS_AS(build_rationale_request(test, exchange, 0, empty), Error);
    CHECK_THROWS_AS(build_rationale_request(test, exchange, 0, unsorted),
                    Error);
  }
}

TEST_CASE("unit test generation") {
  const std::string prompt = "Draft a release note.";

  SUBCASE("keeps questions, drops duplicates and statements") {
    MockBackend teacher;
    teacher.add(build_testgen_request(prompt, {}, 4),
                text_only("1. Is it concise?\n"
                          "2. is it concise?\n"
                          "3. It is thorough.\n"
                          "4. Does it cite sources?\n"
                          "5. Is it polite?\n"
                          "6. Is it accurate?"));
    const auto gen = generate_unit_tests(prompt, {}, 4, teacher);
    REQUIRE(gen.tests.size() == 4);
    CHECK(gen.n_requested == 4);
    CHECK(gen.n_parsed == 6);
    CHECK(gen.n_dropped == 2);
    CHECK_FALSE(gen.shortfall);
    CHECK(gen.tests[0].id == "gen-1");
    CHECK(gen.tests[0].text == "Is it concise?");
    CHECK(gen.tests[3].id == "gen-4");
    CHECK(gen.tests[3].text == "Is it accurate?");
    for (const auto& test : gen.tests) {
      CHECK(test.scope == TestScope::query);
      CHECK(test.origin == TestOrigin::generated);
    }
    TestSuite suite;
    suite.id = "generated";
    suite.tests = gen.tests;
    CHECK_NOTHROW(validate_suite(suite));
  }

  SUBCASE("truncates at the requested count") {
    MockBackend teacher;
    teacher.add(build_testgen_request(prompt, {}, 2),
                text_only("1. Is it clear?\n2. Is it short?\n"
                          "3. Is it bold?\n4. Is it fair?"));
    const auto gen = generate_unit_tests(prompt, {}, 2, teacher);
    REQUIRE(gen.tests.size() == 2);
    CHECK(gen.n_parsed == 4);
    CHECK(gen.n_dropped == 2);
    CHECK_FALSE(gen.shortfall);
  }

  SUBCASE("shortfall is flagged, not fatal") {
    MockBackend teacher;
    teacher.add(build_testgen_request(prompt, {}, 3),
                text_only("1. Is it useful?\n2. It covers the basics."));
    const auto gen = generate_unit_tests(prompt, {}, 3, teacher);
    CHECK(gen.tests.size() == 1);
    CHECK(gen.shortfall);
  }
}

TEST_CASE("contrastive responses and pairs") {
  const UnitTest test = sample_test();
  const std::string prompt = "Explain the outage.";

  SUBCASE("one pair per distinct-target combination, labelled high") {
    MockBackend teacher;
    teacher.add(build_contrastive_request(prompt, test, 5, kSupport),
                text_only("A crisp, complete postmortem."));
    teacher.add(build_contrastive_request(prompt, test, 1, kSupport),
                text_only("Stuff broke."));
    const std::vector<int> targets{5, 1};
    const auto responses =
        generate_contrastive(prompt, test, targets, kSupport, teacher);
    REQUIRE(responses.size() == 2);
    CHECK(responses[0].target_score == 5);
    CHECK(responses[1].response == "Stuff broke.");

    const auto pairs = contrastive_to_pairs(prompt, responses, "contrast");
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].response_a == "A crisp, complete postmortem.");
    CHECK(pairs[0].response_b == "Stuff broke.");
    CHECK(pairs[0].label == PrefLabel::a);
    CHECK(pairs[0].prompt == prompt);
    CHECK(pairs[0].dataset == "contrast");

    const std::vector<ContrastiveResponse> reversed{responses[1],
                                                    responses[0]};
    const auto flipped = contrastive_to_pairs(prompt, reversed, "contrast");
    REQUIRE(flipped.size() == 1);
    CHECK(flipped[0].label == PrefLabel::b);
  }

  SUBCASE("equal targets produce no pair") {
    MockBackend teacher;
    teacher.add(build_contrastive_request(prompt, test, 3, kSupport),
                text_only("A middling answer."));
    const std::vector<int> targets{3, 3};
    const auto responses =
        generate_contrastive(prompt, test, targets, kSupport, teacher);
    REQUIRE(responses.size() == 2);
    CHECK(contrastive_to_pairs(prompt, responses, "d").empty());
  }

  SUBCASE("three targets give all three pairs") {
    MockBackend teacher;
    teacher.add(build_contrastive_request(prompt, test, 5, kSupport),
                text_only("Best."));
    teacher.add(build_contrastive_request(prompt, test, 3, kSupport),
                text_only("Fine."));
    teacher.add(build_contrastive_request(prompt, test, 1, kSupport),
                text_only("Worst."));
    const std::vector<int> targets{5, 3, 1};
    const auto responses =
        generate_contrastive(prompt, test, targets, kSupport, teacher);
    const auto pairs = contrastive_to_pairs(prompt, responses, "d");
    CHECK(pairs.size() == 3);
    for (const auto& pair : pairs) CHECK(pair.label == PrefLabel::a);
  }

  SUBCASE("empty target list and blank teacher output are errors") {
    MockBackend teacher;
    const std::vector<int> none;
    CHECK_THROWS_AS(
        generate_contrastive(prompt, test, none, kSupport, teacher), Error);

    teacher.add(build_contrastive_request(prompt, test, 2, kSupport),
                text_only("   \n"));
    const std::vector<int> targets{2};
    CHECK_THROWS_WITH(
        generate_contrastive(prompt, test, targets, kSupport, teacher),
        doctest::Contains("empty text for target 2"));
  }
}

TEST_CASE("scored rationale generation") {
  const UnitTest test = sample_test();
  const Exchange exchange{"Summarize the memo.", "It says hello."};

  SUBCASE("unseeded generation accepts the first parseable attempt") {
    MockBackend teacher;
    teacher.add(build_rationale_request(test, exchange, 0, kSupport),
                text_only("Covers the key point.\nScore: 4"));
    const auto outcome = generate_rationale_scored(
        test, exchange, std::nullopt, teacher, 3, kSupport);
    REQUIRE(outcome.accepted.has_value());
    CHECK(outcome.accepted->rationale == "Covers the key point.");
    CHECK(outcome.accepted->score == 4);
    CHECK(outcome.attempts == 1);
    CHECK(outcome.mismatched.empty());
  }

  SUBCASE("seeded generation retries until the score matches") {
    MockBackend teacher;
    teacher.add(build_rationale_request(test, exchange, 0, kSupport),
                text_only("Too harsh a read.\nScore: 2"));
    teacher.add(build_rationale_request(test, exchange, 1, kSupport),
                text_only("On reflection it works.\nScore: 4"));
    const auto outcome =
        generate_rationale_scored(test, exchange, 4, teacher, 3, kSupport);
    REQUIRE(outcome.accepted.has_value());
    CHECK(outcome.accepted->score == 4);
    CHECK(outcome.attempts == 2);
    REQUIRE(outcome.mismatched.size() == 1);
    CHECK(outcome.mismatched[0].score == 2);
  }

  SUBCASE("a seed that never matches is a recorded rejection") {
    MockBackend teacher;
    teacher.add(build_rationale_request(test, exchange, 0, kSupport),
                text_only("Meh.\nScore: 3"));
    teacher.add(build_rationale_request(test, exchange, 1, kSupport),
                text_only("Weak.\nScore: 2"));
    const auto outcome =
        generate_rationale_scored(test, exchange, 5, teacher, 2, kSupport);
    CHECK_FALSE(outcome.accepted.has_value());
    CHECK(outcome.mismatched.size() == 2);
    CHECK(outcome.attempts == 2);
  }

  SUBCASE("nothing parseable at all throws") {
    MockBackend teacher;
    teacher.add(build_rationale_request(test, exchange, 0, kSupport),
                text_only("I refuse to commit to a number."));
    teacher.add(build_rationale_request(test, exchange, 1, kSupport),
                text_only("Still no verdict."));
    CHECK_THROWS_WITH(
        generate_rationale_scored(test, exchange, std::nullopt, teacher, 2,
                                  kSupport),
        doctest::Contains("no attempt out of 2"));
  }

  SUBCASE("a score outside the support counts as a failed parse") {
    MockBackend teacher;
    teacher.add(build_rationale_request(test, exchange, 0, kSupport),
                text_only("Beyond the scale.\nScore: 9"));
    CHECK_THROWS_AS(generate_rationale_scored(test, exchange, std::nullopt,
                                              teacher, 1, kSupport),
                    Error);
  }

  SUBCASE("variant_base offsets the fixture keys") {
    MockBackend teacher;
    teacher.add(build_rationale_request(test, exchange, 7, kSupport),
                text_only("Seventh draw.\nScore: 3"));
    const auto outcome = generate_rationale_scored(
        test, exchange, std::nullopt, teacher, 1, kSupport, 7);
    REQUIRE(outcome.accepted.has_value());
    CHECK(outcome.accepted->rationale == "Seventh draw.");
  }

  SUBCASE("max_attempts must be positive") {
    MockBackend teacher;
    CHECK_THROWS_AS(generate_rationale_scored(test, exchange, std::nullopt,
                                              teacher, 0, kSupport),
                    Error);
  }
}

TEST_CASE("rationale pair validation") {
  RationalePair pair;
  pair.unit_test_id = "gut-1";
  pair.chosen_rationale = "Right for the right reasons.";
  pair.rejected_rationale = "Right number, wrong reasons.";
  pair.chosen_score = 4;
  pair.rejected_score = 4;
  CHECK_NOTHROW(validate_rationale_pair(pair, kSupport));

  SUBCASE("identical rationales") {
    pair.rejected_rationale = pair.chosen_rationale;
    CHECK_THROWS_WITH(validate_rationale_pair(pair, kSupport),
                      doctest::Contains("identical"));
  }
  SUBCASE("empty rationale") {
    pair.chosen_rationale.clear();
    CHECK_THROWS_AS(validate_rationale_pair(pair, kSupport), Error);
  }
  SUBCASE("chosen score outside support") {
    pair.chosen_score = 7;
    CHECK_THROWS_WITH(validate_rationale_pair(pair, kSupport),
                      doctest::Contains("outside support"));
  }
}

TEST_CASE("pair strategy names round-trip") {
  for (auto strategy : {PairStrategy::refined, PairStrategy::harmonized,
                        PairStrategy::teacher}) {
    CHECK(parse_pair_strategy(to_string(strategy)) == strategy);
  }
  CHECK_THROWS_WITH(parse_pair_strategy("osmosis"),
                    doctest::Contains("unknown pair strategy"));
}

namespace {

PairCollectionItem graded_item(std::string prompt, std::string response,
                               int gold) {
  PairCollectionItem item;
  item.test = sample_test();
  item.prompt = std::move(prompt);
  item.response = std::move(response);
  item.gold_score = gold;
  return item;
}

CollectConfig quiet_config() {
  CollectConfig config;
  config.parallelism = 2;
  return config;
}

void add_sample(MockBackend& teacher, const PairCollectionItem& item,
                int variant, const std::string& text) {
  const Exchange exchange{item.prompt, item.response};
  teacher.add(build_rationale_request(item.test, exchange, variant, kSupport),
              text_only(text));
}

}  // namespace

TEST_CASE("pair collection: teacher strategy") {
  MockBackend student;  // unused by this strategy

  SUBCASE("correct x incorrect samples become pairs") {
    const auto item = graded_item("P", "R", 4);
    MockBackend teacher;
    add_sample(teacher, item, 0, "Solid check.\nScore: 4");
    add_sample(teacher, item, 1, "Misses the point.\nScore: 2");
    add_sample(teacher, item, 2, "Careful read.\nScore: 4");
    add_sample(teacher, item, 3, "Skims.\nScore: 1");

    const std::vector<PairCollectionItem> items{item};
    const auto result = collect_rationale_pairs(PairStrategy::teacher, items,
                                                student, teacher,
                                                quiet_config());
    CHECK(result.n_items == 1);
    CHECK(result.n_skipped == 0);
    CHECK(result.n_dropped == 0);
    CHECK(result.diagnostics.empty());
    REQUIRE(result.pairs.size() == 4);
    for (const auto& pair : result.pairs) {
      CHECK(pair.strategy == PairStrategy::teacher);
      CHECK(pair.unit_test_id == "gut-1");
      CHECK(pair.response == "R");
      CHECK(pair.chosen_score == 4);
      CHECK_NOTHROW(validate_rationale_pair(pair, kSupport));
    }
    CHECK(result.pairs[0].chosen_rationale == "Solid check.");
    CHECK(result.pairs[0].rejected_rationale == "Misses the point.");
    CHECK(result.pairs[1].rejected_score == 1);
    CHECK(result.pairs[2].chosen_rationale == "Careful read.");
  }

  SUBCASE("max_pairs_per_item caps emission without counting drops") {
    const auto item = graded_item("P", "R", 4);
    MockBackend teacher;
    add_sample(teacher, item, 0, "Solid check.\nScore: 4");
    add_sample(teacher, item, 1, "Misses the point.\nScore: 2");
    add_sample(teacher, item, 2, "Careful read.\nScore: 4");
    add_sample(teacher, item, 3, "Skims.\nScore: 1");

    auto config = quiet_config();
    config.max_pairs_per_item = 2;
    const std::vector<PairCollectionItem> items{item};
    const auto result = collect_rationale_pairs(PairStrategy::teacher, items,
                                                student, teacher, config);
    CHECK(result.pairs.size() == 2);
    CHECK(result.n_dropped == 0);
  }

  SUBCASE("no incorrect samples means nothing to reject") {
    const auto item = graded_item("P", "R", 3);
    MockBackend teacher;
    add_sample(teacher, item, 0, "Fair.\nScore: 3");
    add_sample(teacher, item, 1, "Even-handed.\nScore: 3");
    auto config = quiet_config();
    config.samples_per_item = 2;
    const std::vector<PairCollectionItem> items{item};
    const auto result = collect_rationale_pairs(PairStrategy::teacher, items,
                                                student, teacher, config);
    CHECK(result.pairs.empty());
    CHECK(result.n_skipped == 1);
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0] == "item 0: no rejected candidates");
  }

  SUBCASE("no correct samples means nothing to choose") {
    const auto item = graded_item("P", "R", 5);
    MockBackend teacher;
    add_sample(teacher, item, 0, "Off.\nScore: 2");
    add_sample(teacher, item, 1, "Still off.\nScore: 3");
    auto config = quiet_config();
    config.samples_per_item = 2;
    const std::vector<PairCollectionItem> items{item};
    const auto result = collect_rationale_pairs(PairStrategy::teacher, items,
                                                student, teacher, config);
    CHECK(result.n_skipped == 1);
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0] == "item 0: no chosen candidates");
  }

  SUBCASE("a gold score is required and must sit in the support") {
    PairCollectionItem no_gold;
    no_gold.test = sample_test();
    no_gold.prompt = "P";
    no_gold.response = "R";
    auto off_scale = graded_item("P", "R", 9);
    const std::vector<PairCollectionItem> items{no_gold, off_scale};
    MockBackend teacher;
    const auto result = collect_rationale_pairs(PairStrategy::teacher, items,
                                                student, teacher,
                                                quiet_config());
    CHECK(result.n_skipped == 2);
    REQUIRE(result.diagnostics.size() == 2);
    CHECK(result.diagnostics[0] ==
          "item 0: teacher strategy needs a gold score within the support");
    CHECK(result.diagnostics[1] ==
          "item 1: teacher strategy needs a gold score within the support");
  }

  SUBCASE("unparseable samples are tallied, the rest still pair up") {
    const auto item = graded_item("P", "R", 4);
    MockBackend teacher;
    add_sample(teacher, item, 0, "Solid.\nScore: 4");
    add_sample(teacher, item, 1, "No verdict from me.");
    add_sample(teacher, item, 2, "Slack.\nScore: 2");
    add_sample(teacher, item, 3, "Also refusing to grade.");
    const std::vector<PairCollectionItem> items{item};
    const auto result = collect_rationale_pairs(PairStrategy::teacher, items,
                                                student, teacher,
                                                quiet_config());
    REQUIRE(result.pairs.size() == 1);
    CHECK(result.pairs[0].chosen_rationale == "Solid.");
    CHECK(result.pairs[0].rejected_rationale == "Slack.");
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0] == "item 0: 2 of 4 samples unparseable");
  }

  SUBCASE("output stays in input order across threads") {
    const auto first = graded_item("P1", "R1", 4);
    PairCollectionItem skipped;
    skipped.test = sample_test();
    skipped.prompt = "P2";
    skipped.response = "R2";
    const auto third = graded_item("P3", "R3", 2);

    MockBackend teacher;
    auto config = quiet_config();
    config.samples_per_item = 2;
    config.parallelism = 4;
    add_sample(teacher, first, 0, "Right.\nScore: 4");
    add_sample(teacher, first, 1, "Wrong.\nScore: 1");
    add_sample(teacher, third, 0, "Low and right.\nScore: 2");
    add_sample(teacher, third, 1, "Too generous.\nScore: 5");

    const std::vector<PairCollectionItem> items{first, skipped, third};
    const auto result = collect_rationale_pairs(PairStrategy::teacher, items,
                                                student, teacher, config);
    CHECK(result.n_items == 3);
    CHECK(result.n_skipped == 1);
    REQUIRE(result.pairs.size() == 2);
    CHECK(result.pairs[0].prompt == "P1");
    CHECK(result.pairs[1].prompt == "P3");
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].find("item 1") == 0);
  }
}

TEST_CASE("pair collection: refined strategy") {
  const auto item = graded_item("P", "R", 5);
  const Exchange exchange{"P", "R"};

  SUBCASE("a revision that reaches the gold score beats the original") {
    MockBackend student;
    add_sample(student, item, 0, "Student take.\nScore: 3");
    MockBackend teacher;
    teacher.add(build_revision_request(item.test, exchange, "Student take.", 5,
                                       0, kSupport),
                text_only("Better take.\nScore: 4"));
    teacher.add(build_revision_request(item.test, exchange, "Better take.", 5,
                                       1, kSupport),
                text_only("Best take.\nScore: 5"));
    auto config = quiet_config();
    config.revision_rounds = 2;
    const std::vector<PairCollectionItem> items{item};
    const auto result = collect_rationale_pairs(PairStrategy::refined, items,
                                                student, teacher, config);
    REQUIRE(result.pairs.size() == 1);
    const auto& pair = result.pairs[0];
    CHECK(pair.strategy == PairStrategy::refined);
    CHECK(pair.chosen_rationale == "Best take.");
    CHECK(pair.chosen_score == 5);
    CHECK(pair.rejected_rationale == "Student take.");
    CHECK(pair.rejected_score == 3);
    CHECK(result.n_dropped == 0);
  }

  SUBCASE("an unparseable round re-revises the same rationale") {
    MockBackend student;
    add_sample(student, item, 0, "Student take.\nScore: 3");
    MockBackend teacher;
    teacher.add(build_revision_request(item.test, exchange, "Student take.", 5,
                                       0, kSupport),
                text_only("I decline to finish this one."));
    teacher.add(build_revision_request(item.test, exchange, "Student take.", 5,
                                       1, kSupport),
                text_only("Fixed.\nScore: 5"));
    auto config = quiet_config();
    config.revision_rounds = 2;
    const std::vector<PairCollectionItem> items{item};
    const auto result = collect_rationale_pairs(PairStrategy::refined, items,
                                                student, teacher, config);
    REQUIRE(result.pairs.size() == 1);
    CHECK(result.pairs[0].chosen_rationale == "Fixed.");
  }

  SUBCASE("revisions that never reach gold are dropped") {
    MockBackend student;
    add_sample(student, item, 0, "Student take.\nScore: 3");
    MockBackend teacher;
    teacher.add(build_revision_request(item.test, exchange, "Student take.", 5,
                                       0, kSupport),
                text_only("Still wrong.\nScore: 2"));
    auto config = quiet_config();
    config.revision_rounds = 1;
    const std::vector<PairCollectionItem> items{item};
    const auto result = collect_rationale_pairs(PairStrategy::refined, items,
                                                student, teacher, config);
    CHECK(result.pairs.empty());
    CHECK(result.n_dropped == 1);
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0] ==
          "item 0: no revision reached the gold score within 1 rounds");
  }

  SUBCASE("a student who is already right leaves nothing to refine") {
    MockBackend student;
    add_sample(student, item, 0, "Nailed it.\nScore: 5");
    MockBackend teacher;
    const std::vector<PairCollectionItem> items{item};
    const auto result = collect_rationale_pairs(PairStrategy::refined, items,
                                                student, teacher,
                                                quiet_config());
    CHECK(result.n_skipped == 1);
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0] ==
          "item 0: student already reaches the gold score");
  }

  SUBCASE("an unparseable student rationale skips the item") {
    MockBackend student;
    add_sample(student, item, 0, "No number, no dice.");
    MockBackend teacher;
    const std::vector<PairCollectionItem> items{item};
    const auto result = collect_rationale_pairs(PairStrategy::refined, items,
                                                student, teacher,
                                                quiet_config());
    CHECK(result.n_skipped == 1);
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0].find("item 0:") == 0);
    CHECK(result.diagnostics[0].find("no attempt out of 1") !=
          std::string::npos);
  }
}

TEST_CASE("pair collection: harmonized strategy") {
  PairCollectionItem item;
  item.test = sample_test();
  item.prompt = "P";
  item.response = "A";
  item.response_b = "B";
  item.label = PrefLabel::a;
  const Exchange side_a{"P", "A"};
  const Exchange side_b{"P", "B"};

  MockBackend student;
  student.add(build_rationale_request(item.test, side_a, 0, kSupport),
              text_only("Likes A.\nScore: 3"));
  student.add(build_rationale_request(item.test, side_b, 0, kSupport),
              text_only("Likes B.\nScore: 4"));

  const auto harmonize_a = build_harmonize_request(
      item.test, side_a, "B", "Likes A.", "Likes B.", kSupport);
  const auto harmonize_b = build_harmonize_request(
      item.test, side_b, "A", "Likes B.", "Likes A.", kSupport);

  SUBCASE("the preferred side's harmonized rationale beats the student's") {
    MockBackend teacher;
    teacher.add(harmonize_a, text_only("A holds up side by side.\nScore: 4"));
    teacher.add(harmonize_b, text_only("B reads weaker beside A.\nScore: 2"));
    const std::vector<PairCollectionItem> items{item};
    const auto result = collect_rationale_pairs(PairStrategy::harmonized,
                                                items, student, teacher,
                                                quiet_config());
    REQUIRE(result.pairs.size() == 1);
    const auto& pair = result.pairs[0];
    CHECK(pair.strategy == PairStrategy::harmonized);
    CHECK(pair.response == "A");
    CHECK(pair.chosen_rationale == "A holds up side by side.");
    CHECK(pair.chosen_score == 4);
    CHECK(pair.rejected_rationale == "Likes A.");
    CHECK(pair.rejected_score == 3);
  }

  SUBCASE("harmonized scores must rank the preferred response first") {
    MockBackend teacher;
    teacher.add(harmonize_a, text_only("A still lags.\nScore: 2"));
    teacher.add(harmonize_b, text_only("B stays ahead.\nScore: 4"));
    const std::vector<PairCollectionItem> items{item};
    const auto result = collect_rationale_pairs(PairStrategy::harmonized,
                                                items, student, teacher,
                                                quiet_config());
    CHECK(result.pairs.empty());
    CHECK(result.n_dropped == 1);
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0] ==
          "item 0: harmonized scores do not rank the preferred response "
          "first");
  }

  SUBCASE("a b-labelled pair takes the other side") {
    auto flipped = item;
    flipped.label = PrefLabel::b;
    MockBackend teacher;
    teacher.add(harmonize_a, text_only("A loses ground.\nScore: 2"));
    teacher.add(harmonize_b, text_only("B is clearly ahead.\nScore: 5"));
    const std::vector<PairCollectionItem> items{flipped};
    const auto result = collect_rationale_pairs(PairStrategy::harmonized,
                                                items, student, teacher,
                                                quiet_config());
    REQUIRE(result.pairs.size() == 1);
    CHECK(result.pairs[0].response == "B");
    CHECK(result.pairs[0].chosen_rationale == "B is clearly ahead.");
    CHECK(result.pairs[0].rejected_rationale == "Likes B.");
  }

  SUBCASE("equal harmonized scores drop the item") {
    MockBackend teacher;
    teacher.add(harmonize_a, text_only("Both fine.\nScore: 3"));
    teacher.add(harmonize_b, text_only("Both fine here too.\nScore: 3"));
    const std::vector<PairCollectionItem> items{item};
    const auto result = collect_rationale_pairs(PairStrategy::harmonized,
                                                items, student, teacher,
                                                quiet_config());
    CHECK(result.n_dropped == 1);
    CHECK(result.pairs.empty());
  }

  SUBCASE("ties and missing fields are skipped up front") {
    auto tie = item;
    tie.label = PrefLabel::tie;
    auto lonely = item;
    lonely.response_b.reset();
    MockBackend teacher;
    const std::vector<PairCollectionItem> items{tie, lonely};
    const auto result = collect_rationale_pairs(PairStrategy::harmonized,
                                                items, student, teacher,
                                                quiet_config());
    CHECK(result.n_skipped == 2);
    REQUIRE(result.diagnostics.size() == 2);
    CHECK(result.diagnostics[0] ==
          "item 0: tie label has no preferred side");
    CHECK(result.diagnostics[1] ==
          "item 1: harmonized strategy needs response_b and a label");
  }

  SUBCASE("an unparseable harmonization skips the item") {
    MockBackend teacher;
    teacher.add(harmonize_a, text_only("Words without a verdict."));
    teacher.add(harmonize_b, text_only("B stays ahead.\nScore: 4"));
    const std::vector<PairCollectionItem> items{item};
    const auto result = collect_rationale_pairs(PairStrategy::harmonized,
                                                items, student, teacher,
                                                quiet_config());
    CHECK(result.n_skipped == 1);
    REQUIRE(result.diagnostics.size() == 1);
    CHECK(result.diagnostics[0] ==
          "item 0: harmonized rationale unparseable");
  }
}

TEST_CASE("pair collection rejects degenerate configs") {
  MockBackend student;
  MockBackend teacher;
  const std::vector<PairCollectionItem> one{graded_item("P", "R", 3)};
  const std::vector<PairCollectionItem> none;

  CHECK_THROWS_WITH(collect_rationale_pairs(PairStrategy::teacher, none,
                                            student, teacher, CollectConfig{}),
                    doctest::Contains("no input items"));

  CollectConfig bad;
  bad.samples_per_item = 0;
  CHECK_THROWS_AS(collect_rationale_pairs(PairStrategy::teacher, one, student,
                                          teacher, bad),
                  Error);
  bad = CollectConfig{};
  bad.support = {3, 1};
  CHECK_THROWS_AS(collect_rationale_pairs(PairStrategy::teacher, one, student,
                                          teacher, bad),
                  Error);
}

TEST_CASE("datagen record io") {
  testsupport::TempDir dir("datagen-io");

  SUBCASE("rationale pairs round-trip and reject identical rationales") {
    RationalePair pair;
    pair.unit_test_id = "gut-1";
    pair.prompt = "P";
    pair.response = "R";
    pair.chosen_rationale = "Right reasons.";
    pair.rejected_rationale = "Wrong reasons.";
    pair.strategy = PairStrategy::refined;
    pair.chosen_score = 5;
    pair.rejected_score = 2;
    auto second = pair;
    second.strategy = PairStrategy::harmonized;
    second.prompt = "Q";

    const auto path = dir.file("pairs.jsonl");
    const std::vector<RationalePair> pairs{pair, second};
    save_rationale_pairs(pairs, path);
    const auto loaded = load_rationale_pairs(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0] == pair);
    CHECK(loaded[1] == second);

    const auto bad = dir.file("bad.jsonl");
    std::ofstream out(bad);
    out << R"({"unit_test_id":"t","prompt":"p","response":"r",)"
        << R"("chosen_rationale":"same","rejected_rationale":"same",)"
        << R"("strategy":"teacher","chosen_score":4,"rejected_score":4})"
        << '\n';
    out.close();
    CHECK_THROWS_WITH(load_rationale_pairs(bad),
                      doctest::Contains("identical"));
  }

  SUBCASE("collection items keep their optional fields") {
    PairCollectionItem full;
    full.test = sample_test();
    full.prompt = "P";
    full.response = "A";
    full.gold_score = 4;
    full.response_b = "B";
    full.label = PrefLabel::b;
    PairCollectionItem sparse;
    sparse.test = sample_test();
    sparse.prompt = "P2";
    sparse.response = "R2";

    const auto path = dir.file("items.jsonl");
    const std::vector<PairCollectionItem> items{full, sparse};
    save_collection_items(items, path);
    const auto loaded = load_collection_items(path);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0] == full);
    CHECK(loaded[1] == sparse);
    CHECK_FALSE(loaded[1].gold_score.has_value());
    CHECK_FALSE(loaded[1].label.has_value());
  }

  SUBCASE("rationale records round-trip byte-identically") {
    RationaleRecord record;
    record.unit_test_id = "gut-1";
    record.prompt = "P";
    record.response = "R";
    record.rationale = "Measured and fair.";
    record.score = 4;

    const auto first = dir.file("r1.jsonl");
    const auto second = dir.file("r2.jsonl");
    const std::vector<RationaleRecord> records{record};
    save_rationale_records(records, first);
    save_rationale_records(load_rationale_records(first), second);
    CHECK(testsupport::slurp(first) == testsupport::slurp(second));
    CHECK(load_rationale_records(second)[0] == record);
  }
}
