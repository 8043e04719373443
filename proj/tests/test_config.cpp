#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>

#include "doctest.h"

#include "abelconv/config.hpp"
#include "abelconv/errors.hpp"

using namespace abelconv;

namespace {

std::string failing_field(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const InvalidConfigError& e) {
    return e.field();
  }
  return "none";
}

std::string temp_config(const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / "abelconv_test_config.txt";
  std::ofstream(path) << text;
  return path.string();
}

}  // namespace

TEST_CASE("defaults validate") {
  CHECK_NOTHROW(validate(RunConfig{}));
  CHECK(parse_and_validate("", {}).widths == std::vector<int>{64, 32, 16});
}

TEST_CASE("named errors") {
  CHECK(failing_field([] { parse_and_validate("", {{"group", "[8]"}, {"n", "9"}}); }) == "n");
  CHECK(failing_field([] { parse_and_validate("", {{"bogus", "1"}}); }) == "bogus");
  CHECK(failing_field([] { parse_and_validate("", {{"widths", "[4]"}}); }) == "widths");
  CHECK(failing_field([] { parse_and_validate("", {{"trials", "many"}}); }) == "trials");
  CHECK(failing_field([] { parse_and_validate("", {{"activation", "relu"}}); }) == "activation");
  CHECK(failing_field([] { parse_and_validate("", {{"input", "cauchy"}}); }) == "input");
  CHECK(failing_field([] { parse_and_validate("", {{"offset_policy", "spiral"}}); }) == "offset_policy");
  CHECK(failing_field([] { parse_and_validate("", {{"group", "[0]"}}); }) == "group");
  CHECK(failing_field([] { parse_and_validate("", {{"band_a", "40"}}); }) == "band_a");
  CHECK(failing_field([] { parse_and_validate("", {{"n", "[3, 3, 3]"}}); }) == "n");
  CHECK(failing_field([] { parse_and_validate("", {{"experiment", "dance"}}); }) == "experiment");
  CHECK(failing_field([] { parse_and_validate("/nonexistent/cfg", {}); }) == "config");
}

TEST_CASE("file values, then overrides") {
  const std::string path = temp_config("# comment\ngroup = [2, 8]\nwidths = [4,2]\n\nseed = 5  # inline\n");
  const RunConfig c = parse_and_validate(path, {{"seed", "9"}});
  CHECK(c.group == std::vector<int>{2, 8});
  CHECK(c.widths == std::vector<int>{4, 2});
  CHECK(c.seed == 9);
  CHECK(failing_field([] { parse_and_validate(temp_config("group [8]\n"), {}); }) == "line 1");
}

TEST_CASE("scalars parse as one-element lists and a_override forms") {
  RunConfig c;
  set_config_value(c, "group", "12");
  CHECK(c.group == std::vector<int>{12});
  set_config_value(c, "a_override", "oracle");
  CHECK(c.step_scale.mode == StepScale::Mode::oracle);
  set_config_value(c, "a_override", "0.5");
  CHECK(c.step_scale.mode == StepScale::Mode::fixed);
  CHECK(c.step_scale.value == 0.5);
  set_config_value(c, "a_override", "none");
  CHECK(c.step_scale.mode == StepScale::Mode::standard);
  set_config_value(c, "activation", "softplus");
  CHECK(c.activation == "shifted-softplus");
}

TEST_CASE("canonical text round trip and hash") {
  RunConfig c;
  c.group = {2, 4};
  c.seed = 77;
  c.step_scale = StepScale::fixed(0.1);
  c.offset_policy = OffsetPolicy::contiguous;
  RunConfig back;
  apply_config_text(back, to_text(c));
  CHECK(to_text(back) == to_text(c));
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);

  RunConfig moved = c;
  moved.output_dir = "/elsewhere";
  moved.format = "json";
  CHECK(config_hash(moved) == config_hash(c));
  RunConfig reseeded = c;
  reseeded.seed = 78;
  CHECK(config_hash(reseeded) != config_hash(c));
  CHECK(to_json(c)["group"] == nlohmann::json({2, 4}));
}

TEST_CASE("hypotheses") {
  RunConfig c;
  const Hypotheses h = check_hypotheses(c);
  CHECK_FALSE(h.width_ratio);
  CHECK(h.d_max_le_order);
  CHECK_FALSE(h.d_min_log);
  CHECK(h.order_ge_depth);
  c.c_w = 1.0;
  CHECK(check_hypotheses(c).width_ratio);
  c.widths = {1, 1};
  c.group = {1};
  c.c_w = 0.5;
  CHECK(check_hypotheses(c).d_min_log);
}
