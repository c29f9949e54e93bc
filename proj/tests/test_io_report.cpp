#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "freeinv/io.hpp"
#include "freeinv/report.hpp"

using namespace freeinv;

TEST(TensorJson, RoundTrip) {
  const auto f = mirror_counterexample(6);
  const auto back = tensor_from_json(json::parse(tensor_to_json(f).dump()));
  EXPECT_EQ(back.N(), 6);
  EXPECT_EQ(back.degree(), 3);
  EXPECT_EQ(back.entries(), f.entries());
}

TEST(TensorJson, ExplicitEntriesAndErrors) {
  const auto f = tensor_from_json(json::parse(R"({"N": 2, "d": 2, "entries": [{"idx": [1, 2], "val": 0.5}, {"idx": [2, 1], "val": 0.5}]})"));
  EXPECT_EQ(f.at({1, 2}), 0.5);
  EXPECT_EQ(f.nnz(), 2u);
  EXPECT_THROW(tensor_from_json(json::parse(R"({"N": 2, "d": 2, "entries": [{"idx": [1, 2], "val": 1}, {"idx": [1, 2], "val": 2}]})")),
               ArgumentError);
  EXPECT_THROW(tensor_from_json(json::parse(R"({"N": 2, "d": 2, "entries": [{"idx": [1, 3], "val": 1}]})")), ArgumentError);
  EXPECT_THROW(tensor_from_json(json::parse(R"({"N": 2, "entries": []})")), ArgumentError);
  EXPECT_THROW(tensor_from_json(json::parse("[1, 2]")), ArgumentError);
  EXPECT_EQ(tensor_from_json(json::parse(R"({"N": 3, "d": 2})")).nnz(), 0u);
}

TEST(TensorJson, Families) {
  const auto star = tensor_from_json(json::parse(R"({"family": "quadratic_star", "params": {"N": 4}})"));
  EXPECT_EQ(star.entries(), quadratic_star(4).entries());
  const auto sw = tensor_from_json(json::parse(R"({"family": "sliding_window", "params": {"N": 8, "k": 2, "normalize": true}})"));
  EXPECT_NEAR(sw.norm_sq(), 1.0, 1e-12);
  const auto a = tensor_from_json(json::parse(R"({"family": "random_tensor", "params": {"N": 5, "d": 3, "seed": 7}})"));
  const auto b = tensor_from_json(json::parse(R"({"family": "random_tensor", "params": {"N": 5, "d": 3, "seed": 7}})"));
  EXPECT_EQ(a.entries(), b.entries());
  EXPECT_THROW(tensor_from_json(json::parse(R"({"family": "nope", "params": {"N": 4}})")), ArgumentError);
  EXPECT_THROW(tensor_from_json(json::parse(R"({"family": "quadratic_star"})")), ArgumentError);
}

TEST(KernelJson, RoundTrip) {
  DiscreteKernel g(3, 2);
  g.set({1, 3}, -0.25);
  const auto j = kernel_to_json(g);
  EXPECT_EQ(j.at("q"), 2);
  EXPECT_EQ(kernel_from_json(j).entries(), g.entries());
}

TEST(LawJson, AllKinds) {
  const auto s = law_from_json(json::parse(R"({"kind": "semicircular", "params": {"variance": 2}})"));
  EXPECT_EQ(s.moment(2), 2.0);
  const auto r = law_from_json(json::parse(R"({"kind": "rademacher", "max_order": 32})"));
  EXPECT_EQ(r.max_order(), 32u);
  const auto a = law_from_json(json::parse(
      R"({"kind": "atoms", "name": "skew", "params": {"atoms": [{"position": 3, "weight": 0.2}, {"position": -1, "weight": 0.8}], "standardize": true}})"));
  EXPECT_EQ(a.name(), "skew");
  EXPECT_NEAR(a.moment(2), 1.0, 1e-12);
  const auto m = law_from_json(json::parse(R"({"kind": "moments", "params": {"moments": [0, 1, 0, 2]}})"));
  EXPECT_EQ(m.max_order(), 4u);
  EXPECT_THROW(law_from_json(json::parse(R"({"kind": "cauchy"})")), ArgumentError);
  EXPECT_THROW(law_from_json(json::parse(R"({"params": {}})")), ArgumentError);
  EXPECT_THROW(law_from_json(json::parse(R"({"kind": "atoms", "params": {"atoms": [{"position": 1, "weight": 0.7}]}})")), ArgumentError);

  for (const auto& law : {s, r, a, m}) EXPECT_TRUE(law_from_json(law_to_json(law)).same_moments(law)) << law.name();
}

TEST(LawJson, Assignments) {
  const auto single = laws_from_json(json::parse(R"({"kind": "rademacher"})"), 3);
  EXPECT_EQ(single.shared(1).get(), single.shared(3).get());
  const auto mixed =
      laws_from_json(json::parse(R"({"default": {"kind": "rademacher"}, "per_index": {"2": {"kind": "semicircular"}}})"), 3, 32);
  EXPECT_EQ(mixed.law(2).kind(), LawKind::semicircular);
  EXPECT_EQ(mixed.law(1).kind(), LawKind::rademacher);
  EXPECT_EQ(mixed.law(1).max_order(), 32u);
  EXPECT_THROW(laws_from_json(json::parse(R"({"per_index": {"1": {"kind": "rademacher"}}})"), 2), ArgumentError);
  EXPECT_THROW(laws_from_json(json::parse(R"({"default": {"kind": "rademacher"}, "per_index": {"5": {"kind": "rademacher"}}})"), 2),
               ArgumentError);
  EXPECT_THROW(laws_from_json(json::parse(R"({"default": {"kind": "rademacher"}, "per_index": {"x": {"kind": "rademacher"}}})"), 2),
               ArgumentError);
  EXPECT_THROW(laws_from_json(json::parse("3"), 2), ArgumentError);
}

TEST(ReadFile, MissingAndMalformed) {
  EXPECT_THROW(read_json_file("/nonexistent/freeinv.json"), ArgumentError);
  const std::string path = ::testing::TempDir() + "freeinv_bad.json";
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  EXPECT_THROW(read_json_file(path), ArgumentError);
  std::remove(path.c_str());
}

TEST(Report, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(NAN), "null");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Report, JsonAndCsv) {
  ExperimentReport r;
  r.experiment = "demo";
  r.rows.push_back(ojson{{"N", 2}, {"moment", 1.5}});
  r.rows.push_back(ojson{{"N", 4}, {"moment", 1.75}, {"label", "a,b"}});
  r.check("first", true, "ok");
  r.notes.push_back("hello");
  EXPECT_TRUE(r.all_pass());

  const auto text = to_json_text(r);
  const auto parsed = json::parse(text);
  EXPECT_EQ(parsed.at("experiment"), "demo");
  EXPECT_EQ(parsed.at("rows").size(), 2u);
  EXPECT_EQ(parsed.at("all_pass"), true);

  const auto csv = to_csv_text(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "N,moment,label");
  EXPECT_NE(csv.find("2,1.5,\n"), std::string::npos);
  EXPECT_NE(csv.find("4,1.75,\"a,b\"\n"), std::string::npos);
  EXPECT_NE(csv.find("# check,first,PASS,ok"), std::string::npos);
  EXPECT_NE(csv.find("# note,hello"), std::string::npos);

  r.check("second", false);
  EXPECT_FALSE(r.all_pass());
  EXPECT_EQ(json::parse(to_json_text(r)).at("all_pass"), false);
}

TEST(Report, NonFiniteBecomesNull) {
  ExperimentReport r;
  r.rows.push_back(ojson{{"x", INFINITY}, {"y", 0.1}});
  const auto parsed = json::parse(to_json_text(r));
  EXPECT_TRUE(parsed.at("rows")[0].at("x").is_null());
  EXPECT_NE(to_json_text(r).find("0.10000000000000001"), std::string::npos);
}
