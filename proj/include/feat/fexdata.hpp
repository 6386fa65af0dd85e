#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "feat/common.hpp"
#include "feat/geometry.hpp"

// The Fex time-series data model: per-frame facebox, 68 landmarks, 20 AU
// activations and 7 emotion scores, with session labels. Missing detections
// are NaN (empty CSV cells). Tables are immutable values; operations return
// new tables.

namespace feat::fex {

inline constexpr std::size_t kNumAus = 20;
inline constexpr std::size_t kNumEmotions = 7;
inline constexpr std::size_t kNumLandmarkCols = 136;
inline constexpr std::size_t kNumFaceboxCols = 5;

/// AU columns in AU-number order.
extern const std::array<std::string, kNumAus> kAuNames;
extern const std::array<std::string, kNumEmotions> kEmotionNames;
extern const std::array<std::string, kNumFaceboxCols> kFaceboxNames;

/// AU numbers behind kAuNames (1,2,4,...,43).
extern const std::array<int, kNumAus> kAuNumbers;

/// 20 named action-unit activations, kAuNames order.
using AUVector = std::array<double, kNumAus>;
/// anger, disgust, fear, happiness, sadness, surprise, neutral.
using EmotionVector = std::array<double, kNumEmotions>;

/// Full schema column names in canonical order
/// (frame,time_s,session,facebox...,x_0..y_67,AU01..AU43,anger..neutral).
const std::vector<std::string>& schema_columns();

enum class ColumnGroup { facebox, landmarks, aus, emotions };

struct FexRow {
    std::int64_t frame = 0;
    double time_s = 0.0;
    std::string session;

    std::array<double, kNumFaceboxCols> facebox = nan_fill<kNumFaceboxCols>();
    std::array<double, kNumLandmarkCols> landmarks = nan_fill<kNumLandmarkCols>();
    AUVector aus = nan_fill<kNumAus>();
    EmotionVector emotions = nan_fill<kNumEmotions>();

    /// Raw cell text of preserved unknown columns, FexTable::extra_columns order.
    std::vector<std::string> extra;

    bool has_facebox() const;
    bool has_landmarks() const;
    std::optional<geom::FaceBox> facebox_or() const;
    /// Fails on partially-present landmark coordinates.
    std::optional<geom::LandmarkSet> landmarks_or() const;

    template <std::size_t N>
    static std::array<double, N> nan_fill() {
        std::array<double, N> a;
        a.fill(std::numeric_limits<double>::quiet_NaN());
        return a;
    }
};

struct FexTable {
    std::vector<FexRow> rows;
    /// Unknown header columns, preserved verbatim on round-trip.
    std::vector<std::string> extra_columns;

    std::size_t size() const { return rows.size(); }
};

FexTable read_fex_csv(const std::string& path);
FexTable read_fex_csv(std::istream& in);

void write_fex_csv(const FexTable& table, const std::string& path);
void write_fex_csv(const FexTable& table, std::ostream& out);

/// Rows x group-columns matrix in schema column order, NaN preserved.
Matrix select(const FexTable& table, ColumnGroup group);

/// Partition by session label, first-occurrence order, row order preserved.
std::vector<std::pair<std::string, FexTable>> group_by_session(const FexTable& table);

/// NaN-aware equality of all schema fields plus extras (NaN == NaN here).
bool tables_equal(const FexTable& a, const FexTable& b);

}  // namespace feat::fex
