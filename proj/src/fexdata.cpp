#include "feat/fexdata.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace feat::fex {

const std::array<std::string, kNumAus> kAuNames = {
    "AU01", "AU02", "AU04", "AU05", "AU06", "AU07", "AU09", "AU10", "AU12", "AU14",
    "AU15", "AU17", "AU18", "AU20", "AU23", "AU24", "AU25", "AU26", "AU28", "AU43"};

const std::array<int, kNumAus> kAuNumbers = {1,  2,  4,  5,  6,  7,  9,  10, 12, 14,
                                             15, 17, 18, 20, 23, 24, 25, 26, 28, 43};

const std::array<std::string, kNumEmotions> kEmotionNames = {
    "anger", "disgust", "fear", "happiness", "sadness", "surprise", "neutral"};

const std::array<std::string, kNumFaceboxCols> kFaceboxNames = {
    "FaceRectX", "FaceRectY", "FaceRectWidth", "FaceRectHeight", "FaceScore"};

const std::vector<std::string>& schema_columns() {
    static const std::vector<std::string> cols = [] {
        std::vector<std::string> c = {"frame", "time_s", "session"};
        for (const auto& n : kFaceboxNames) c.push_back(n);
        for (int i = 0; i < 68; ++i) c.push_back("x_" + std::to_string(i));
        for (int i = 0; i < 68; ++i) c.push_back("y_" + std::to_string(i));
        for (const auto& n : kAuNames) c.push_back(n);
        for (const auto& n : kEmotionNames) c.push_back(n);
        return c;
    }();
    return cols;
}

namespace {

template <std::size_t N>
bool any_finite(const std::array<double, N>& a) {
    return std::any_of(a.begin(), a.end(), [](double v) { return !std::isnan(v); });
}

std::vector<std::string_view> split_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

}  // namespace

bool FexRow::has_facebox() const { return any_finite(facebox); }
bool FexRow::has_landmarks() const { return any_finite(landmarks); }

std::optional<geom::FaceBox> FexRow::facebox_or() const {
    if (!has_facebox()) return std::nullopt;
    return geom::FaceBox{facebox[0], facebox[1], facebox[2], facebox[3], facebox[4]};
}

std::optional<geom::LandmarkSet> FexRow::landmarks_or() const {
    if (!has_landmarks()) return std::nullopt;
    for (double v : landmarks)
        if (std::isnan(v)) fail("MalformedNumber", "partially present landmark coordinates");
    return geom::LandmarkSet::from_flat(landmarks);
}

FexTable read_fex_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoFailure", "cannot open " + path);
    return read_fex_csv(in);
}

FexTable read_fex_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) fail("MissingColumn", "empty file, no header");
    if (!header.empty() && header.back() == '\r') header.pop_back();

    const auto names = split_line(header);
    std::unordered_map<std::string_view, std::size_t> where;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!where.emplace(names[i], i).second)
            fail("DuplicateColumn", std::string(names[i]));
    }

    // Column index per schema slot; unknown header columns become extras.
    const auto& schema = schema_columns();
    std::vector<std::size_t> slot(schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto it = where.find(schema[i]);
        if (it == where.end()) fail("MissingColumn", schema[i]);
        slot[i] = it->second;
    }

    FexTable table;
    std::vector<std::size_t> extra_slot;
    std::vector<bool> is_schema(names.size(), false);
    for (std::size_t s : slot) is_schema[s] = true;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!is_schema[i]) {
            table.extra_columns.emplace_back(names[i]);
            extra_slot.push_back(i);
        }
    }

    std::string line;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
        const auto cells = split_line(line);
        if (cells.size() != names.size())
            fail("MalformedNumber", "row " + std::to_string(row_no) + ": expected " +
                                        std::to_string(names.size()) + " cells, got " +
                                        std::to_string(cells.size()));

        FexRow row;
        auto numeric = [&](std::size_t schema_idx) -> double {
            const std::string_view cell = cells[slot[schema_idx]];
            if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
            double v;
            if (!parse_double(cell, v))
                fail("MalformedNumber", "row " + std::to_string(row_no) + ", column " +
                                            schema_columns()[schema_idx] + ": '" +
                                            std::string(cell) + "'");
            return v;
        };

        if (!parse_int64(cells[slot[0]], row.frame))
            fail("MalformedNumber",
                 "row " + std::to_string(row_no) + ", column frame: '" + std::string(cells[slot[0]]) + "'");
        row.time_s = numeric(1);
        row.session = std::string(cells[slot[2]]);
        std::size_t k = 3;
        for (std::size_t i = 0; i < kNumFaceboxCols; ++i) row.facebox[i] = numeric(k++);
        for (std::size_t i = 0; i < kNumLandmarkCols; ++i) row.landmarks[i] = numeric(k++);
        for (std::size_t i = 0; i < kNumAus; ++i) row.aus[i] = numeric(k++);
        for (std::size_t i = 0; i < kNumEmotions; ++i) row.emotions[i] = numeric(k++);

        row.extra.reserve(extra_slot.size());
        for (std::size_t s : extra_slot) row.extra.emplace_back(cells[s]);
        table.rows.push_back(std::move(row));
        ++row_no;
    }
    return table;
}

void write_fex_csv(const FexTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("IoFailure", "cannot open " + path + " for writing");
    write_fex_csv(table, out);
    if (!out) fail("IoFailure", "write failed: " + path);
}

void write_fex_csv(const FexTable& table, std::ostream& out) {
    auto cell = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };

    const auto& schema = schema_columns();
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (i) out << ',';
        out << schema[i];
    }
    for (const auto& name : table.extra_columns) out << ',' << name;
    out << '\n';

    for (const auto& row : table.rows) {
        out << row.frame << ',' << cell(row.time_s) << ',' << row.session;
        for (double v : row.facebox) out << ',' << cell(v);
        for (double v : row.landmarks) out << ',' << cell(v);
        for (double v : row.aus) out << ',' << cell(v);
        for (double v : row.emotions) out << ',' << cell(v);
        for (const auto& v : row.extra) out << ',' << v;
        out << '\n';
    }
}

Matrix select(const FexTable& table, ColumnGroup group) {
    const std::size_t n = table.rows.size();
    std::size_t cols = 0;
    switch (group) {
        case ColumnGroup::facebox: cols = kNumFaceboxCols; break;
        case ColumnGroup::landmarks: cols = kNumLandmarkCols; break;
        case ColumnGroup::aus: cols = kNumAus; break;
        case ColumnGroup::emotions: cols = kNumEmotions; break;
    }
    Matrix m(n, cols);
    for (std::size_t r = 0; r < n; ++r) {
        const FexRow& row = table.rows[r];
        const double* src = nullptr;
        switch (group) {
            case ColumnGroup::facebox: src = row.facebox.data(); break;
            case ColumnGroup::landmarks: src = row.landmarks.data(); break;
            case ColumnGroup::aus: src = row.aus.data(); break;
            case ColumnGroup::emotions: src = row.emotions.data(); break;
        }
        std::copy(src, src + cols, m.row(r).data());
    }
    return m;
}

std::vector<std::pair<std::string, FexTable>> group_by_session(const FexTable& table) {
    std::vector<std::pair<std::string, FexTable>> groups;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& row : table.rows) {
        auto it = index.find(row.session);
        if (it == index.end()) {
            it = index.emplace(row.session, groups.size()).first;
            groups.emplace_back(row.session, FexTable{{}, table.extra_columns});
        }
        groups[it->second].second.rows.push_back(row);
    }
    return groups;
}

namespace {

bool nan_eq(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }

template <std::size_t N>
bool nan_eq(const std::array<double, N>& a, const std::array<double, N>& b) {
    for (std::size_t i = 0; i < N; ++i)
        if (!nan_eq(a[i], b[i])) return false;
    return true;
}

}  // namespace

bool tables_equal(const FexTable& a, const FexTable& b) {
    if (a.rows.size() != b.rows.size() || a.extra_columns != b.extra_columns) return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const FexRow& x = a.rows[i];
        const FexRow& y = b.rows[i];
        if (x.frame != y.frame || !nan_eq(x.time_s, y.time_s) || x.session != y.session ||
            !nan_eq(x.facebox, y.facebox) || !nan_eq(x.landmarks, y.landmarks) ||
            !nan_eq(x.aus, y.aus) || !nan_eq(x.emotions, y.emotions) || x.extra != y.extra)
            return false;
    }
    return true;
}

}  // namespace feat::fex
