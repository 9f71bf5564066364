// Copyright 2026 The relbc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RELBC_SPACETIME_HPP
#define RELBC_SPACETIME_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace relbc {

/// A point in Minkowski space, in the agreed inertial frame. Units with c = 1.
struct Event {
    double t = 0;
    double x = 0;
    double y = 0;
    double z = 0;

    bool operator==(const Event &) const = default;

    bool finite() const {
        return std::isfinite(t) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }

    /// Same spatial location, different time.
    Event at_time(double time) const {
        return {time, x, y, z};
    }
};

inline double spatial_distance(const Event &a, const Event &b) {
    return std::hypot(b.x - a.x, b.y - a.y, b.z - a.z);
}

/// (Δt)² − |Δx|². Positive for timelike separation.
inline double interval_squared(const Event &a, const Event &b) {
    const double dt = b.t - a.t;
    const double dx = spatial_distance(a, b);
    return dt * dt - dx * dx;
}

/// Absolute band on the squared interval inside which separation counts as lightlike.
inline constexpr double kLightlikeTolerance = 1e-12;

enum class IntervalClass { Timelike, Spacelike, Lightlike };

inline const char *to_string(IntervalClass c) {
    switch (c) {
        case IntervalClass::Timelike:
            return "TIMELIKE";
        case IntervalClass::Spacelike:
            return "SPACELIKE";
        case IntervalClass::Lightlike:
            return "LIGHTLIKE";
    }
    return "?";
}

inline IntervalClass interval_class(const Event &a, const Event &b) {
    const double s = interval_squared(a, b);
    if (std::abs(s) <= kLightlikeTolerance) {
        return IntervalClass::Lightlike;
    }
    return s > 0 ? IntervalClass::Timelike : IntervalClass::Spacelike;
}

/// True iff `receive` lies in the causal future of `send` (or coincides with it).
inline bool causal_ok(const Event &send, const Event &receive) {
    const double dt = receive.t - send.t;
    if (dt < 0) {
        return false;
    }
    return dt * dt - std::pow(spatial_distance(send, receive), 2) >= -kLightlikeTolerance;
}

/// Earliest event at `location`'s spatial point that a light-speed signal from `from` can reach.
inline Event light_arrival(const Event &from, const Event &location) {
    return location.at_time(from.t + spatial_distance(from, location));
}

enum class CommitmentClass { LC, FFPD, TC, Invalid };

inline const char *to_string(CommitmentClass c) {
    switch (c) {
        case CommitmentClass::LC:
            return "LC";
        case CommitmentClass::FFPD:
            return "FFPD";
        case CommitmentClass::TC:
            return "TC";
        case CommitmentClass::Invalid:
            return "INVALID";
    }
    return "?";
}

/// Lightlike causal, fixed frame positive duration, timelike causal, or none of these.
/// Mixed separations between the unveiling points are Invalid.
inline CommitmentClass classify_commitment(const Event &commit, const std::vector<Event> &unveils) {
    if (unveils.empty()) {
        throw std::invalid_argument("classify_commitment: no unveiling points");
    }
    auto classify_one = [&](const Event &q) {
        if (!(q.t > commit.t)) {
            return CommitmentClass::Invalid;
        }
        switch (interval_class(commit, q)) {
            case IntervalClass::Lightlike:
                return CommitmentClass::LC;
            case IntervalClass::Timelike:
                return CommitmentClass::TC;
            case IntervalClass::Spacelike:
                return CommitmentClass::FFPD;
        }
        return CommitmentClass::Invalid;
    };
    const CommitmentClass first = classify_one(unveils.front());
    for (const Event &q : unveils) {
        if (classify_one(q) != first) {
            return CommitmentClass::Invalid;
        }
    }
    return first;
}

/// Commitment point P and unveiling points Q_0, Q_1 in the fixed frame.
struct CommitmentGeometry {
    Event commit_point;
    std::vector<Event> unveil_points;
    CommitmentClass classification = CommitmentClass::Invalid;

    CommitmentGeometry() = default;
    CommitmentGeometry(Event p, std::vector<Event> qs)
        : commit_point(p), unveil_points(std::move(qs)),
          classification(classify_commitment(commit_point, unveil_points)) {
    }

    bool valid() const {
        return classification != CommitmentClass::Invalid;
    }

    const Event &unveil_point(int bit) const {
        return unveil_points.at(static_cast<std::size_t>(bit));
    }

    /// Spatial midpoint between P and Q_b, at time t(P).
    Event midpoint(int bit) const {
        const Event &q = unveil_point(bit);
        return {commit_point.t, (commit_point.x + q.x) / 2, (commit_point.y + q.y) / 2,
                (commit_point.z + q.z) / 2};
    }
};

enum class VerifyPolicy { AtP, AtQb, Midpoint };

inline const char *to_string(VerifyPolicy p) {
    switch (p) {
        case VerifyPolicy::AtP:
            return "AT_P";
        case VerifyPolicy::AtQb:
            return "AT_Q_b";
        case VerifyPolicy::Midpoint:
            return "MIDPOINT";
    }
    return "?";
}

/// Spatial location (time component t(P)) at which ETBC verification takes place.
inline Event verification_location(const CommitmentGeometry &geom, int bit, VerifyPolicy policy) {
    switch (policy) {
        case VerifyPolicy::AtP:
            return geom.commit_point;
        case VerifyPolicy::AtQb:
            return geom.unveil_point(bit).at_time(geom.commit_point.t);
        case VerifyPolicy::Midpoint:
            return geom.midpoint(bit);
    }
    throw std::invalid_argument("verification_location: unknown policy");
}

/// Earliest event at the policy's location at which both qubit sets can be present:
/// those leaving P at t(P) and those leaving Q_b at `unveil_time`.
inline Event earliest_verification_event(const CommitmentGeometry &geom, int bit,
                                         double unveil_time, VerifyPolicy policy) {
    const Event where = verification_location(geom, bit, policy);
    const Event from_p = light_arrival(geom.commit_point, where);
    const Event from_q = light_arrival(geom.unveil_point(bit).at_time(unveil_time), where);
    return where.at_time(std::max(from_p.t, from_q.t));
}

/// ETBC verification time when B_c only releases his qubits once he learns the claimed
/// bit at `learn_time` (at P's location). Bob cannot pre-route them without knowing b.
inline Event informed_verification_event(const CommitmentGeometry &geom, int bit,
                                         double unveil_time, double learn_time,
                                         VerifyPolicy policy) {
    const Event where = verification_location(geom, bit, policy);
    const Event departure = geom.commit_point.at_time(std::max(geom.commit_point.t, learn_time));
    const Event from_p = light_arrival(departure, where);
    const Event from_q = light_arrival(geom.unveil_point(bit).at_time(unveil_time), where);
    return where.at_time(std::max(from_p.t, from_q.t));
}

/// ETRBC verification at B_b: his subset leaves P at t(P), the unveiled qubits are local.
inline Event etrbc_verification_event(const CommitmentGeometry &geom, int bit, double unveil_time) {
    const Event &q = geom.unveil_point(bit);
    const Event from_p = light_arrival(geom.commit_point, q);
    return q.at_time(std::max(from_p.t, unveil_time));
}

}  // namespace relbc

#endif  // RELBC_SPACETIME_HPP
