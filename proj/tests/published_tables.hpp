#pragma once

// Published confusion counts and printed metrics of the three result tables.

#include <array>

namespace mcc::testing {

struct TableRow {
    const char* table;
    const char* method;
    long tp, fp, fn, total;
    double acc, prec, rec, f;
};

inline constexpr std::array<TableRow, 12> kPublishedRows{{
    {"I", "CCFind", 334, 142, 524, 1000, 0.33, 0.70, 0.39, 0.50},
    {"I", "MacDuff", 29, 199, 772, 1000, 0.03, 0.13, 0.04, 0.06},
    {"I", "MCCFind", 536, 3, 461, 1000, 0.54, 0.99, 0.54, 0.70},
    {"I", "MCCNetFind", 855, 29, 116, 1000, 0.85, 0.97, 0.88, 0.92},
    {"II", "MCCFind", 1287, 11, 1154, 2452, 0.52, 0.99, 0.53, 0.69},
    {"II", "MCCNetFind", 2039, 122, 291, 2452, 0.83, 0.94, 0.88, 0.91},
    {"III", "Kordecki", 440, 110, 19, 569, 0.770, 0.800, 0.960, 0.870},
    {"III", "X-Rite", 306, 241, 22, 569, 0.540, 0.560, 0.930, 0.700},
    {"III", "CCFind", 430, 36, 103, 569, 0.760, 0.920, 0.810, 0.860},
    {"III", "MacDuff", 41, 180, 348, 569, 0.070, 0.190, 0.110, 0.130},
    {"III", "MCCFind", 523, 3, 43, 569, 0.920, 0.990, 0.920, 0.960},
    {"III", "MCCNetFind", 553, 3, 13, 569, 0.972, 0.995, 0.977, 0.986},
}};

// Half of the last printed digit, plus slack for exact halves such as 0.855.
inline constexpr double kRoundingTolerance = 0.005 + 1e-9;

}  // namespace mcc::testing
