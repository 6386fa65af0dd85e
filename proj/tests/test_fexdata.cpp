#include <doctest.h>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "feat/fexdata.hpp"

using namespace feat;
using namespace feat::fex;

namespace {

FexTable random_table(SplitMix64& rng, std::size_t max_rows, bool allow_nan) {
    FexTable t;
    const std::size_t n = rng.next_below(max_rows + 1);
    const std::array<std::string, 3> sessions = {"", "s1", "clip_b"};
    std::array<std::int64_t, 3> next_frame{};
    for (std::size_t i = 0; i < n; ++i) {
        FexRow row;
        const std::size_t si = rng.next_below(3);
        row.session = sessions[si];
        row.frame = next_frame[si]++;
        row.time_s = static_cast<double>(row.frame) / 30.0;
        auto fill = [&](double* data, std::size_t count) {
            for (std::size_t c = 0; c < count; ++c) {
                if (allow_nan && rng.next_below(7) == 0) continue;  // stays NaN
                data[c] = rng.next_double();
            }
        };
        fill(row.facebox.data(), row.facebox.size());
        fill(row.landmarks.data(), row.landmarks.size());
        fill(row.aus.data(), row.aus.size());
        fill(row.emotions.data(), row.emotions.size());
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string to_csv_string(const FexTable& t) {
    std::ostringstream out;
    write_fex_csv(t, out);
    return out.str();
}

FexTable from_csv_string(const std::string& s) {
    std::istringstream in(s);
    return read_fex_csv(in);
}

}  // namespace

TEST_SUITE_BEGIN("fexdata");

TEST_CASE("schema has the documented 171 columns") {
    CHECK(schema_columns().size() == 171);
    CHECK(schema_columns()[0] == "frame");
    CHECK(schema_columns()[8] == "x_0");
    CHECK(schema_columns()[144] == "AU01");
    CHECK(schema_columns().back() == "neutral");
}

TEST_CASE("empty data section yields a 0-row table") {
    std::ostringstream header;
    const auto& cols = schema_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) header << (i ? "," : "") << cols[i];
    header << "\n";
    const FexTable t = from_csv_string(header.str());
    CHECK(t.rows.empty());
}

TEST_CASE("0-row table writes header line only") {
    const std::string out = to_csv_string(FexTable{});
    CHECK(out.back() == '\n');
    CHECK(out.find("frame,time_s,session,FaceRectX") == 0);
    CHECK(std::count(out.begin(), out.end(), '\n') == 1);
}

TEST_CASE("value 0.5 serializes as the literal 0.5") {
    FexTable t;
    FexRow row;
    row.aus[0] = 0.5;
    t.rows.push_back(row);
    const std::string out = to_csv_string(t);
    CHECK(out.find(",0.5,") != std::string::npos);
}

TEST_CASE("missing column is rejected with its name") {
    std::ostringstream header;
    const auto& cols = schema_columns();
    bool first = true;
    for (const auto& c : cols) {
        if (c == "x_67") continue;
        header << (first ? "" : ",") << c;
        first = false;
    }
    header << "\n";
    try {
        from_csv_string(header.str());
        FAIL("expected MissingColumn");
    } catch (const FeatError& e) {
        CHECK(e.code() == "MissingColumn");
        CHECK(std::string(e.what()).find("x_67") != std::string::npos);
    }
}

TEST_CASE("duplicate column is rejected") {
    std::ostringstream header;
    const auto& cols = schema_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) header << (i ? "," : "") << cols[i];
    header << ",AU01\n";
    try {
        from_csv_string(header.str());
        FAIL("expected DuplicateColumn");
    } catch (const FeatError& e) {
        CHECK(e.code() == "DuplicateColumn");
        CHECK(std::string(e.what()).find("AU01") != std::string::npos);
    }
}

TEST_CASE("malformed numbers carry row and column") {
    FexTable t;
    t.rows.push_back(FexRow{});
    std::string csv = to_csv_string(t);
    const auto pos = csv.rfind("0,0,");
    csv.replace(pos, 1, "x");
    try {
        from_csv_string(csv);
        FAIL("expected MalformedNumber");
    } catch (const FeatError& e) {
        CHECK(e.code() == "MalformedNumber");
    }
}

TEST_CASE("round-trip: read(write(t)) == t over 1000 random tables") {
    SplitMix64 rng(0x5eedULL);
    for (int trial = 0; trial < 1000; ++trial) {
        const FexTable t = random_table(rng, 6, true);
        const FexTable back = from_csv_string(to_csv_string(t));
        REQUIRE(tables_equal(t, back));
    }
}

TEST_CASE("write-read-write is byte identical through files") {
    SplitMix64 rng(42);
    const auto dir = std::filesystem::temp_directory_path() / "feat_fexdata_test";
    std::filesystem::create_directories(dir);
    for (int trial = 0; trial < 25; ++trial) {
        const FexTable t = random_table(rng, 10, true);
        const auto p1 = (dir / "a.csv").string();
        const auto p2 = (dir / "b.csv").string();
        write_fex_csv(t, p1);
        write_fex_csv(read_fex_csv(p1), p2);
        std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
        std::stringstream s1, s2;
        s1 << f1.rdbuf();
        s2 << f2.rdbuf();
        REQUIRE(s1.str() == s2.str());
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("unknown extra columns survive round-trip verbatim") {
    std::ostringstream csv;
    const auto& cols = schema_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) csv << (i ? "," : "") << cols[i];
    csv << ",Pitch,custom_tag\n";
    csv << "0,0.5,sess";
    for (std::size_t i = 3; i < cols.size(); ++i) csv << ",";
    csv << ",-12.5,hello\n";

    const FexTable t = from_csv_string(csv.str());
    REQUIRE(t.extra_columns == std::vector<std::string>{"Pitch", "custom_tag"});
    REQUIRE(t.rows.size() == 1);
    CHECK(t.rows[0].extra == std::vector<std::string>{"-12.5", "hello"});
    const FexTable back = from_csv_string(to_csv_string(t));
    CHECK(tables_equal(t, back));
}

TEST_CASE("select returns the schema-ordered group matrices") {
    SplitMix64 rng(3);
    const FexTable t = random_table(rng, 8, true);
    CHECK(select(t, ColumnGroup::emotions).cols() == 7);
    CHECK(select(t, ColumnGroup::landmarks).cols() == 136);
    CHECK(select(t, ColumnGroup::aus).cols() == 20);
    CHECK(select(t, ColumnGroup::facebox).cols() == 5);
    const Matrix aus = select(t, ColumnGroup::aus);
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        for (std::size_t c = 0; c < 20; ++c) {
            const bool both_nan = std::isnan(aus(r, c)) && std::isnan(t.rows[r].aus[c]);
            CHECK((both_nan || aus(r, c) == t.rows[r].aus[c]));
        }
}

TEST_CASE("group column sets partition the schema") {
    // facebox + landmarks + aus + emotions + {frame, time_s, session} = all.
    CHECK(5 + 136 + 20 + 7 + 3 == schema_columns().size());
    std::set<std::string> all(schema_columns().begin(), schema_columns().end());
    CHECK(all.size() == schema_columns().size());
}

TEST_CASE("group_by_session partitions in first-occurrence order") {
    FexTable t;
    for (const char* s : {"a", "a", "b"}) {
        FexRow row;
        row.session = s;
        row.frame = static_cast<std::int64_t>(t.rows.size());
        t.rows.push_back(row);
    }
    const auto groups = group_by_session(t);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].first == "a");
    CHECK(groups[0].second.rows.size() == 2);
    CHECK(groups[1].first == "b");
    CHECK(groups[1].second.rows[0].frame == 2);
}

TEST_CASE("group_by_session never drops or duplicates rows") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        FexTable t;
        const std::size_t n = 100;
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < n; ++i) {
            FexRow row;
            row.session = "s" + std::to_string(rng.next_below(9));
            row.frame = static_cast<std::int64_t>(i);
            labels.push_back(row.session);
            t.rows.push_back(row);
        }
        const auto groups = group_by_session(t);
        std::size_t total = 0;
        for (const auto& [name, part] : groups) {
            total += part.rows.size();
            // Per-row membership oracle: every row in the part carries the
            // part label and appears at its original position order.
            for (const auto& row : part.rows) CHECK(row.session == name);
        }
        CHECK(total == n);
        // Concatenation equals the original (scan oracle by frame ids).
        std::vector<std::int64_t> seen;
        for (const auto& [name, part] : groups)
            for (const auto& row : part.rows) seen.push_back(row.frame);
        std::sort(seen.begin(), seen.end());
        for (std::size_t i = 0; i < n; ++i) CHECK(seen[i] == static_cast<std::int64_t>(i));
    }
}

TEST_SUITE_END();
