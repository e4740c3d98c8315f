#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hdbench/dataio/dense.hpp"
#include "hdbench/dataio/manifest.hpp"
#include "hdbench/dataio/tabular.hpp"
#include "hdbench/eval/metrics.hpp"
#include "hdbench/linmodels.hpp"

using namespace hdbench;

namespace {

DenseDataset parse(const std::string& text, std::size_t nf, LabelMap map = LabelMap::zero_one) {
  std::istringstream in(text);
  return parse_dense(in, nf, map);
}

std::string dump(const DenseDataset& ds) {
  std::ostringstream out;
  write_dense(out, ds);
  return out.str();
}

// Rows as sortable (label, features...) tuples.
std::vector<std::vector<double>> canonical_rows(const DenseDataset& ds) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::vector<double> r{ds.label(i)};
    const auto x = ds.row(i);
    r.insert(r.end(), x.begin(), x.end());
    rows.push_back(std::move(r));
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

TEST(ParseDense, AllZeroRowWithPositiveLabel) {
  std::string line = "1";
  for (int i = 0; i < 2000; ++i) line += ",0";
  const auto ds = parse(line + "\n", 2000);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds.label(0), 1.0);
  for (double v : ds.row(0)) EXPECT_EQ(v, 0.0);
}

TEST(ParseDense, PlusMinusOneMapsToZeroOne) {
  const auto ds = parse("-1,0.5,-0.25\n", 2, LabelMap::plus_minus_one);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds.label(0), 0.0);
  EXPECT_EQ(ds.row(0)[0], 0.5);
  EXPECT_EQ(ds.row(0)[1], -0.25);
  EXPECT_EQ(parse("+1,1,2\n", 2, LabelMap::plus_minus_one).label(0), 1.0);
}

TEST(ParseDense, MalformedLineIsNamed) {
  std::string text;
  for (int line = 1; line <= 12; ++line) {
    text += line == 7 ? "1,0.5\n" : "0,0.5,0.25\n";
  }
  try {
    parse(text, 2);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos) << e.what();
  }
}

TEST(ParseDense, NonNumericFieldNamesLineAndColumn) {
  try {
    parse("0,1,2\n1,abc,2\n", 2);
    FAIL();
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column 2"), std::string::npos) << msg;
  }
}

TEST(ParseDense, LabelOutsideAlphabetRejected) {
  EXPECT_THROW(parse("2,1,2\n", 2), DataError);
  EXPECT_THROW(parse("0,1,2\n", 2, LabelMap::plus_minus_one), DataError);
  EXPECT_THROW(parse("1,inf,2\n", 2), DataError);
}

TEST(ParseDense, ToleratesCrlf) {
  const auto ds = parse("1,1.5,2\r\n0,3,4\r\n", 2);
  ASSERT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.row(0)[1], 2.0);
}

TEST(ParseDense, WriteParseRoundTripIsBitExact) {
  const auto ds = generate_synthetic(200, 7, 1.3, 99);
  const auto again = parse(dump(ds), 7);
  EXPECT_EQ(ds, again);
  DenseDataset odd(3);
  const std::vector<double> row{0.1, 1e-300, -123456.789e10};
  odd.add_row(1.0, row);
  EXPECT_EQ(parse(dump(odd), 3), odd);
}

TEST(Synthetic, PureFunctionOfArguments) {
  EXPECT_EQ(dump(generate_synthetic(100, 5, 0.0, 7)), dump(generate_synthetic(100, 5, 0.0, 7)));
  EXPECT_NE(dump(generate_synthetic(100, 5, 0.0, 7)), dump(generate_synthetic(100, 5, 0.0, 8)));
}

TEST(Synthetic, ClassesRoughlyBalanced) {
  const auto ds = generate_synthetic(100, 5, 0.0, 7);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) pos += ds.label(i) == 1.0;
  EXPECT_GE(pos, 30u);
  EXPECT_GE(ds.size() - pos, 30u);
  EXPECT_TRUE(ds.is_binary());
}

TEST(Synthetic, LinearModelSeparatesHoldout) {
  const auto ds = generate_synthetic(10000, 200, 4.0, 1);
  std::vector<std::size_t> train_idx, test_idx;
  for (std::size_t i = 0; i < ds.size(); ++i) (i % 5 == 4 ? test_idx : train_idx).push_back(i);
  const auto train = ds.subset(train_idx);
  const auto test = ds.subset(test_idx);
  SgdConfig cfg;
  cfg.epochs_or_iters = 5;
  cfg.seed = 3;
  const auto model = train_logistic(train, cfg);
  std::vector<int> y(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) y[i] = static_cast<int>(test.label(i));
  EXPECT_GE(eval::auc_roc(y, decision_scores(model, test)), 0.95);
}

TEST(SplitParts, EvenAndRemainderSizes) {
  const auto even = split_parts(generate_synthetic(100, 3, 1.0, 1), 5, 11);
  for (const auto& p : even.parts) EXPECT_EQ(p.size(), 20u);
  const auto odd = split_parts(generate_synthetic(101, 3, 1.0, 1), 5, 11);
  std::vector<std::size_t> sizes;
  for (const auto& p : odd.parts) sizes.push_back(p.size());
  std::sort(sizes.begin(), sizes.end());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{20, 20, 20, 20, 21}));
  EXPECT_EQ(odd.manifest.num_rows, 101u);
  EXPECT_EQ(odd.manifest.parts.size(), 5u);
}

TEST(SplitParts, ConservesRowsForAllK) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto ds = generate_synthetic(37 + seed * 13, 4, 0.5, seed);
    const auto want = canonical_rows(ds);
    for (std::size_t k = 2; k <= 10; ++k) {
      const auto split = split_parts(ds, k, seed * 100 + k);
      DenseDataset joined(ds.num_features());
      for (const auto& p : split.parts) {
        EXPECT_FALSE(p.size() == 0);
        for (std::size_t i = 0; i < p.size(); ++i) joined.add_row(p.label(i), p.row(i));
      }
      EXPECT_EQ(canonical_rows(joined), want) << "k=" << k;
    }
  }
}

TEST(SplitParts, RejectsBadK) {
  const auto ds = generate_synthetic(4, 2, 1.0, 1);
  EXPECT_THROW(split_parts(ds, 1, 0), ConfigError);
  EXPECT_THROW(split_parts(ds, 5, 0), ConfigError);
}

TEST(Manifest, JsonRoundTripAndStrictKeys) {
  const auto split = split_parts(generate_synthetic(30, 2, 1.0, 5), 3, 9, "toy");
  const auto j = to_json(split.manifest);
  EXPECT_EQ(manifest_from_json(j), split.manifest);
  auto extra = j;
  extra["comment"] = "x";
  EXPECT_THROW(manifest_from_json(extra), DataError);
  auto missing = j;
  missing.erase("seed");
  EXPECT_THROW(manifest_from_json(missing), DataError);
  auto no_seed = j;
  no_seed["seed"] = nullptr;
  EXPECT_FALSE(manifest_from_json(no_seed).seed.has_value());
}

TEST(Manifest, LoadPartsChecksRowTotal) {
  const auto dir = std::filesystem::temp_directory_path() / "hdbench_test_manifest";
  std::filesystem::create_directories(dir);
  const auto ds = generate_synthetic(25, 3, 1.0, 2);
  auto split = split_parts(ds, 4, 1, "m");
  for (std::size_t p = 0; p < split.parts.size(); ++p) {
    std::ofstream out(dir / split.manifest.parts[p]);
    write_dense(out, split.parts[p]);
  }
  const auto loaded = load_manifest_parts(split.manifest, dir);
  ASSERT_EQ(loaded.size(), 4u);
  for (std::size_t p = 0; p < 4; ++p) EXPECT_EQ(loaded[p], split.parts[p]);
  split.manifest.num_rows = 26;
  EXPECT_THROW(load_manifest_parts(split.manifest, dir), DataError);
  std::filesystem::remove_all(dir);
}

TEST(Tabular, QuotedCommaField) {
  std::istringstream in("a,b\n1,\"x,y\"\n");
  const auto f = parse_tabular(in, {{"a", ColumnKind::number}, {"b", ColumnKind::text}});
  ASSERT_EQ(f.num_rows(), 1u);
  EXPECT_EQ(f.number(0, 0), 1.0);
  EXPECT_EQ(f.text(0, 1), "x,y");
}

TEST(Tabular, EmptyNumberIsMissingNotZero) {
  std::istringstream in("a,b\n,hello\n");
  const auto f = parse_tabular(in, {{"a", ColumnKind::number}, {"b", ColumnKind::text}});
  EXPECT_TRUE(is_missing(f.at(0, 0)));
  EXPECT_FALSE(f.number(0, 0).has_value());
}

TEST(Tabular, NaSentinelText) {
  std::istringstream in("id,name\n1,alpha\n2,NA\n3,\"a \"\"quoted\"\" word\"\n");
  const auto f = parse_tabular(in, {{"id", ColumnKind::number}, {"name", ColumnKind::text}});
  ASSERT_EQ(f.num_rows(), 3u);
  EXPECT_TRUE(is_missing(f.at(1, 1)));
  EXPECT_EQ(f.text(2, 1), "a \"quoted\" word");
}

TEST(Tabular, MultilineQuotedFieldAndExtraColumns) {
  std::istringstream in("x,keep,y\n1,\"line one\nline two\",2\n");
  const auto f = parse_tabular(in, {{"keep", ColumnKind::text}});
  ASSERT_EQ(f.num_rows(), 1u);
  EXPECT_EQ(f.text(0, 0), "line one\nline two");
}

TEST(Tabular, MissingHeaderColumnAndBadNumber) {
  std::istringstream a("a\n1\n");
  EXPECT_THROW(parse_tabular(a, {{"a", ColumnKind::number}, {"b", ColumnKind::text}}), DataError);
  std::istringstream b("a\nxyz\n");
  EXPECT_THROW(parse_tabular(b, {{"a", ColumnKind::number}}), DataError);
}

TEST(Tabular, WriteParseRoundTrip) {
  TabularFrame f({{"n", ColumnKind::number}, {"t", ColumnKind::text}});
  f.add_row({1.5, std::string("plain")});
  f.add_row({std::monostate{}, std::string("with, comma and \"quotes\"")});
  f.add_row({-2.0, std::monostate{}});
  std::ostringstream out;
  write_tabular(out, f);
  std::istringstream in(out.str());
  const auto g = parse_tabular(in, f.columns());
  ASSERT_EQ(g.num_rows(), 3u);
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 2; ++c) EXPECT_EQ(g.at(r, c), f.at(r, c)) << r << "," << c;
  }
}

TEST(Currency, StripRules) {
  EXPECT_EQ(parse_currency("$1,234"), 1234.0);
  EXPECT_EQ(parse_currency("ITL 45,000"), 45000.0);
  EXPECT_FALSE(parse_currency("n/a").has_value());
  EXPECT_FALSE(parse_currency("").has_value());
}

TEST(Currency, CleanConvertsTextColumnToNumber) {
  TabularFrame f({{"title", ColumnKind::text}, {"budget", ColumnKind::text}});
  f.add_row({std::string("A"), std::string("$1,234")});
  f.add_row({std::string("B"), std::string("ITL 45,000")});
  f.add_row({std::string("C"), std::string("n/a")});
  const auto g = clean_currency(f, {"budget"});
  EXPECT_EQ(g.columns()[1].kind, ColumnKind::number);
  EXPECT_EQ(g.number(0, 1), 1234.0);
  EXPECT_EQ(g.number(1, 1), 45000.0);
  EXPECT_TRUE(is_missing(g.at(2, 1)));
  EXPECT_EQ(g.text(0, 0), "A");
}
