#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace gpl {

// Distances evaluate to this sentinel when no chain exists; it is ordered
// above every reachable value.
inline constexpr int64_t kUnreachable = std::numeric_limits<int64_t>::max() / 4;

enum class QualChange { Pos, Neg, Inc, Dec, None };

struct FeatureInfo {
    std::string name;
    bool numeric = false;
    int cost = 0;
};

// Feature valuations over the sampled states; the encoder and the abstraction
// extractor work on this view only, so tests can feed synthetic features.
struct FeatureMatrix {
    std::vector<FeatureInfo> features;
    std::vector<std::vector<int64_t>> values;  // [state][feature]

    size_t num_features() const { return features.size(); }
    int64_t value(int state, int f) const {
        return values[static_cast<size_t>(state)][static_cast<size_t>(f)];
    }
    // Truth of the abstract atom: p for booleans, n=0 for numerics.
    bool zero(int state, int f) const { return value(state, f) == 0; }
    bool distinguishes(int f, int s, int t) const { return zero(s, f) != zero(t, f); }

    QualChange delta(int f, int src, int dst) const {
        int64_t a = value(src, f), b = value(dst, f);
        if (a == b) return QualChange::None;
        if (features[static_cast<size_t>(f)].numeric)
            return b > a ? QualChange::Inc : QualChange::Dec;
        return b > a ? QualChange::Pos : QualChange::Neg;
    }
};

}  // namespace gpl
