#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "fairtree/dataset.hpp"
#include "fairtree/error.hpp"
#include "support.hpp"

using namespace fairtree;

namespace {

const char* kTinySchema = R"(
name = tiny
target = label
positive_label = yes
protected = group
privileged_value = A
categorical = colour
missing = ?
)";

EncodedDataset tiny(const std::string& csv)
{
    return preprocess(parse_csv(csv), parse_schema(kTinySchema));
}

EncodedDataset labelled(std::size_t n)
{
    std::vector<std::vector<double>> x(n, std::vector<double>(1));
    std::vector<std::uint8_t> y(n);
    std::vector<std::uint8_t> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i][0] = static_cast<double>(i);
        y[i] = i % 3 == 0 ? 1 : 0;
        z[i] = i % 2;
    }
    return EncodedDataset::from_rows(x, y, z);
}

std::size_t positives(const EncodedDataset& d)
{
    return static_cast<std::size_t>(std::count(d.y.begin(), d.y.end(), 1));
}

} // namespace

TEST_SUITE("dataset")
{
    TEST_CASE("split sizes round half up")
    {
        auto s = split_sizes(1000);
        CHECK(s.learn == 563);
        CHECK(s.validation == 187);
        CHECK(s.test == 250);

        s = split_sizes(16);
        CHECK(s.learn == 9);
        CHECK(s.validation == 3);
        CHECK(s.test == 4);

        for (std::size_t n = 16; n < 3000; ++n) {
            auto const t = split_sizes(n);
            REQUIRE(t.learn + t.validation + t.test == n);
            CHECK(t.learn == static_cast<std::size_t>(std::floor(9.0 * n / 16.0 + 0.5)));
            CHECK(t.test == static_cast<std::size_t>(std::floor(n / 4.0 + 0.5)));
        }
    }

    TEST_CASE("fewer than 16 rows cannot be split")
    {
        CHECK_THROWS_AS(split(labelled(15), 1), DataError);
    }

    TEST_CASE("partitions are disjoint and cover every row")
    {
        Rng pick(2024);
        for (int trial = 0; trial < 100; ++trial) {
            auto const n = 16 + pick.index(485);
            auto const data = labelled(n);
            for (bool stratify : {false, true}) {
                auto const s = split(data, pick.next(), stratify);
                std::vector<std::size_t> ids;
                for (auto const* part : {&s.learn, &s.validation, &s.test}) {
                    ids.insert(ids.end(), part->row_ids.begin(), part->row_ids.end());
                }
                std::sort(ids.begin(), ids.end());
                std::vector<std::size_t> all(n);
                std::iota(all.begin(), all.end(), std::size_t{0});
                REQUIRE(ids == all);
                auto const sizes = split_sizes(n);
                CHECK(s.learn.rows() == sizes.learn);
                CHECK(s.validation.rows() == sizes.validation);
            }
        }
    }

    TEST_CASE("same seed gives the same partition, another seed a different one")
    {
        auto const data = labelled(200);
        auto const a = split(data, 7);
        auto const b = split(data, 7);
        auto const c = split(data, 8);
        CHECK(a.learn.row_ids == b.learn.row_ids);
        CHECK(a.test.row_ids == b.test.row_ids);
        CHECK(a.learn.row_ids != c.learn.row_ids);
    }

    TEST_CASE("partition carries the rows it names")
    {
        auto const data = labelled(64);
        auto const s = split(data, 3);
        for (std::size_t i = 0; i < s.validation.rows(); ++i) {
            auto const src = s.validation.row_ids[i];
            CHECK(s.validation.value(i, 0) == data.value(src, 0));
            CHECK(s.validation.y[i] == data.y[src]);
            CHECK(s.validation.z[i] == data.z[src]);
        }
    }

    TEST_CASE("stratified split keeps class shares within one row")
    {
        auto const data = labelled(480);
        auto const share = static_cast<double>(positives(data)) / static_cast<double>(data.rows());
        auto const s = split(data, 11, true);
        for (auto const* part : {&s.learn, &s.validation, &s.test}) {
            double const expected = share * static_cast<double>(part->rows());
            CHECK(std::abs(static_cast<double>(positives(*part)) - expected) <= 1.0);
        }
    }

    TEST_CASE("redraws until validation and test can be scored")
    {
        // a single negative in group 1: most partitions lose it from validation or test
        std::vector<std::vector<double>> x;
        std::vector<std::uint8_t> y;
        std::vector<std::uint8_t> z;
        for (int i = 0; i < 40; ++i) {
            x.push_back({static_cast<double>(i)});
            z.push_back(i < 20 ? 0 : 1);
            y.push_back(i < 20 ? static_cast<std::uint8_t>(i % 2) : static_cast<std::uint8_t>(i < 23 ? 0 : 1));
        }
        auto const data = EncodedDataset::from_rows(x, y, z);
        std::ostringstream log;
        auto const s = split_for_objectives(data, 5, false, &log);
        CHECK(supports_objectives(s.validation));
        CHECK(supports_objectives(s.test));
        if (s.attempt > 0) {
            CHECK(log.str().find("seed 5") != std::string::npos);
        }

        std::vector<std::uint8_t> no_negatives(40, 1);
        no_negatives[0] = 0;
        auto const hopeless = EncodedDataset::from_rows(x, no_negatives, z);
        CHECK_THROWS_AS(split_for_objectives(hopeless, 5, false, nullptr, 20), DataError);
    }

    TEST_CASE("categorical codes follow first appearance")
    {
        auto const d = tiny("colour,group,label\na,A,yes\nb,B,no\na,A,no\nc,B,yes\n");
        REQUIRE(d.cols() == 1);
        CHECK(d.feature_kinds[0] == FeatureKind::categorical);
        CHECK(d.code_books[0] == std::vector<std::string>{"a", "b", "c"});
        std::vector<double> codes;
        for (std::size_t r = 0; r < d.rows(); ++r) {
            codes.push_back(d.value(r, 0));
        }
        CHECK(codes == std::vector<double>{0, 1, 0, 2});
        CHECK(d.y == std::vector<std::uint8_t>{1, 0, 0, 1});
        CHECK(d.z == std::vector<std::uint8_t>{1, 0, 1, 0});
    }

    TEST_CASE("imputation: mode for categoricals, median for numbers")
    {
        auto const d = tiny("colour,age,group,label\nb,30,A,yes\n?,?,B,no\na,10,A,no\nb,20,B,yes\n");
        REQUIRE(d.cols() == 2);
        CHECK(d.value(1, 0) == d.value(0, 0));
        CHECK(d.value(1, 1) == doctest::Approx(20.0));

        auto const full = tiny("colour,age,group,label\nb,30,A,yes\na,10,B,no\na,10,A,no\nb,20,B,yes\n");
        CHECK(full.value(0, 1) == 30.0);
        CHECK(full.value(3, 1) == 20.0);
    }

    TEST_CASE("unknown target values map to the negative class")
    {
        auto const d = tiny("colour,group,label\na,A,yes\nb,B,maybe\na,A,no\n");
        CHECK(d.y == std::vector<std::uint8_t>{1, 0, 0});
    }

    TEST_CASE("bad input is rejected with the right error")
    {
        CHECK_THROWS_AS(tiny("colour,group,label\n?,A,yes\n?,B,no\n"), DataError);
        CHECK_THROWS_AS(tiny("colour,group,label\na,A,yes\nb,B,yes\n"), DataError);
        CHECK_THROWS_AS(tiny("colour,group,label\na,A\n"), DataError);
        CHECK_THROWS_AS(parse_schema("name = x\ncolour = red\n"), SchemaError);
        CHECK_THROWS_AS(load_schema("/nonexistent/file.schema"), IoError);

        auto const dir = testing::scratch_dir("dataset_errors");
        auto schema = parse_schema(kTinySchema);
        {
            std::ofstream(dir / "header.csv") << "colour,group,label\n";
            std::ofstream(dir / "partial.csv") << "colour,label\na,yes\n";
        }
        auto const empty = load_dataset(dir / "header.csv", schema);
        CHECK(empty.rows.empty());
        CHECK_THROWS_AS(preprocess(empty, schema), DataError);
        CHECK_THROWS_AS(load_dataset(dir / "partial.csv", schema), SchemaError);
        CHECK_THROWS_AS(load_dataset(dir / "missing.csv", schema), IoError);
    }

    TEST_CASE("quoted CSV fields")
    {
        auto const raw = parse_csv("a,b\r\n\"x, y\",\"say \"\"hi\"\"\"\r\n\r\n1,2\r\n");
        REQUIRE(raw.rows.size() == 2);
        CHECK(raw.rows[0][0] == "x, y");
        CHECK(raw.rows[0][1] == "say \"hi\"");
        CHECK(raw.rows[1][1] == "2");
    }

    TEST_CASE("benchmark files have the expected class and group counts")
    {
        struct Expect {
            const char* schema;
            std::size_t rows;
            std::size_t ones;
            std::size_t features;
        };
        // feature counts exclude the target and the protected attribute
        for (auto const& e : {Expect{"german", 1000, 300, 19}, Expect{"adult", 32561, 7841, 13},
                              Expect{"propublica", 7214, 3251, 11}, Expect{"propublica-violent", 4743, 775, 11},
                              Expect{"ricci", 118, 56, 3}}) {
            CAPTURE(e.schema);
            auto const schema = load_schema(testing::data_dir() / (std::string(e.schema) + ".schema"));
            auto const raw = load_dataset(schema.file, schema);
            auto const d = preprocess(raw, schema);
            CHECK(d.rows() == e.rows);
            CHECK(positives(d) == e.ones);
            CHECK(d.cols() == e.features);
            CHECK(std::find(d.feature_names.begin(), d.feature_names.end(), schema.protected_column) ==
                  d.feature_names.end());
            CHECK(std::find(d.feature_names.begin(), d.feature_names.end(), schema.target_column) ==
                  d.feature_names.end());
        }

        auto const german = load_schema(testing::data_dir() / "german.schema");
        CHECK(read_csv(german.file).header.size() == 21);
    }
}
