#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "wearlab/csv.hpp"
#include "wearlab/rng.hpp"
#include "wearlab/timeutil.hpp"

using namespace wearlab;

TEST_CASE("rng streams are deterministic and derivable") {
    Rng a = Rng::seeded(42);
    Rng b = Rng::seeded(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());

    Rng parent = Rng::seeded(7);
    parent.next();
    parent.next();
    Rng c1 = parent.derive({1, 2});
    Rng c2 = Rng::seeded(7).derive({1, 2});
    CHECK(c1.next() == c2.next());  // derivation ignores parent consumption

    Rng c3 = Rng::seeded(7).derive({1, 3});
    CHECK(c1.next() != c3.next());
}

TEST_CASE("uniform01 stays in [0,1) and below() is in range") {
    Rng r = Rng::seeded(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(r.below(7) < 7);
    }
}

TEST_CASE("normal has roughly the right moments") {
    Rng r = Rng::seeded(3);
    double sum = 0, sq = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double v = r.normal(2.0, 3.0);
        sum += v;
        sq += v * v;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(mean == doctest::Approx(2.0).epsilon(0.05));
    CHECK(var == doctest::Approx(9.0).epsilon(0.05));
}

TEST_CASE("shuffle is a permutation") {
    Rng r = Rng::seeded(5);
    std::vector<int> xs(50);
    for (int i = 0; i < 50; ++i) xs[i] = i;
    r.shuffle(xs);
    std::set<int> seen(xs.begin(), xs.end());
    CHECK(seen.size() == 50);
}

TEST_CASE("civil date round trip and weekday") {
    for (int64_t day : {-720000L, -1L, 0L, 1L, 19000L, 720000L}) {
        CHECK(days_from_civil(civil_from_days(day)) == day);
    }
    CHECK(weekday(Date{1970, 1, 1}) == 3);   // Thursday
    CHECK(weekday(Date{2022, 3, 5}) == 5);   // Saturday
    CHECK(weekday(Date{2022, 3, 6}) == 6);   // Sunday
    CHECK(weekday(Date{2022, 3, 7}) == 0);   // Monday
    CHECK(is_weekend(Date{2022, 3, 5}));
    CHECK(!is_weekend(Date{2022, 3, 7}));
    CHECK(add_days(Date{2022, 2, 27}, 3) == Date{2022, 3, 2});
}

TEST_CASE("timestamp parsing handles offsets") {
    const Timestamp t = parse_timestamp("2022-03-01T08:15:30+01:00");
    CHECK(t.offset_sec == 3600);
    CHECK(t.local_date() == Date{2022, 3, 1});
    CHECK(t.local_minute_of_day() == doctest::Approx(8 * 60 + 15.5));
    CHECK(format_timestamp(t) == "2022-03-01T08:15:30+01:00");

    const Timestamp z = parse_timestamp("2022-03-01T23:59:59Z");
    CHECK(z.offset_sec == 0);
    CHECK(format_timestamp(z) == "2022-03-01T23:59:59Z");

    const Timestamp neg = parse_timestamp("2022-03-01T01:30:00-05:00");
    CHECK(neg.local_date() == Date{2022, 3, 1});
    CHECK(neg.epoch_sec == parse_timestamp("2022-03-01T06:30:00Z").epoch_sec);

    CHECK_THROWS_AS(parse_timestamp("2022-03-01T08:15:30"), DomainError);  // no offset
    CHECK_THROWS_AS(parse_timestamp("2022-03-01 08:15:30Z"), DomainError);
    CHECK_THROWS_AS(parse_timestamp("not-a-time"), DomainError);
    CHECK_THROWS_AS(parse_date("2022-13-01"), DomainError);
}

TEST_CASE("timestamps order by instant, not wall clock") {
    const Timestamp early = parse_timestamp("2022-03-01T09:00:00+02:00");  // 07:00Z
    const Timestamp late = parse_timestamp("2022-03-01T08:00:00Z");
    CHECK(early < late);
}

TEST_CASE("csv table reports schema and row errors") {
    const auto t = CsvTable::from_string("a,b\n1,2\n,3\n", "mem.csv");
    CHECK(t.rows() == 2);
    CHECK(t.column("a") == 0);
    CHECK_THROWS_AS(t.column("missing"), SchemaError);
    CHECK(t.required_number(0, 1) == 2.0);
    CHECK(!t.number(1, 0).has_value());
    CHECK_THROWS_AS(t.required_number(1, 0), RowError);

    CHECK_THROWS_AS(CsvTable::from_string("a,b\n1\n", "mem.csv"), RowError);
    try {
        CsvTable::from_string("a,b\n1,2\nx,zz\n", "mem.csv").required_number(1, 1);
        FAIL("expected RowError");
    } catch (const RowError& e) {
        CHECK(e.line() == 3);  // 1-based, header is line 1
    }
}
