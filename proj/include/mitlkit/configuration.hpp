#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "interval.hpp"

namespace mitlkit {

// A configuration maps locations to sorted lists of pairwise-disjoint
// intervals; locations with no interval are absent.  Touching intervals like
// [0,1],(1,2] are fine, overlapping ones are not representable.  The map
// keyed by location name gives a canonical form, so equality and ordering
// are structural.
class Configuration {
public:
    Configuration() = default;

    // Inserts one state.  Returns false (leaving the configuration possibly
    // extended by earlier calls) when the interval overlaps a distinct
    // existing interval at the same location; an identical interval is
    // absorbed silently (sets, not multisets).
    bool try_add(const std::string& loc, const Interval& ivl) {
        auto& list = data_[loc];
        std::size_t at = list.size();
        for (std::size_t k = 0; k < list.size(); ++k) {
            if (list[k] == ivl) return true;
            if (ivl < list[k]) { at = k; break; }
        }
        if (at > 0 && !interval_lt(list[at - 1], ivl)) return false;
        if (at < list.size() && !interval_lt(ivl, list[at])) return false;
        list.insert(list.begin() + at, ivl);
        return true;
    }

    // Union with another configuration under the same overlap rule.
    bool try_merge(const Configuration& other) {
        for (const auto& [loc, list] : other.data_)
            for (const auto& ivl : list)
                if (!try_add(loc, ivl)) return false;
        return true;
    }

    static std::optional<Configuration> from_states(
        const std::vector<std::pair<std::string, Interval>>& states) {
        Configuration c;
        for (const auto& [loc, ivl] : states)
            if (!c.try_add(loc, ivl)) return std::nullopt;
        return c;
    }

    bool empty() const { return data_.empty(); }

    const std::map<std::string, std::vector<Interval>>& locations() const { return data_; }

    // Interval list of one location; empty if absent.
    std::vector<Interval> at(const std::string& loc) const {
        auto it = data_.find(loc);
        return it == data_.end() ? std::vector<Interval>{} : it->second;
    }

    bool has(const std::string& loc) const { return data_.count(loc) != 0; }

    // Replaces one location's list wholesale; caller guarantees the list is
    // sorted and disjoint (merge_location outputs qualify).
    void set_location(const std::string& loc, std::vector<Interval> list) {
        if (list.empty()) data_.erase(loc);
        else data_[loc] = std::move(list);
    }

    std::vector<std::pair<std::string, Interval>> states() const {
        std::vector<std::pair<std::string, Interval>> out;
        for (const auto& [loc, list] : data_)
            for (const auto& ivl : list) out.emplace_back(loc, ivl);
        return out;
    }

    Configuration elapse(const Rational& t) const {
        Configuration c;
        for (const auto& [loc, list] : data_) {
            std::vector<Interval> shifted;
            shifted.reserve(list.size());
            for (const auto& ivl : list) shifted.push_back(ivl.shift(t));
            c.data_[loc] = std::move(shifted);
        }
        return c;
    }

    std::size_t copies() const {
        std::size_t n = 0;
        for (const auto& [loc, list] : data_) n += clock_copies(list);
        return n;
    }

    bool subset_of(const Configuration& other) const {
        for (const auto& [loc, list] : data_) {
            auto it = other.data_.find(loc);
            if (it == other.data_.end()) return false;
            for (const auto& ivl : list) {
                bool found = false;
                for (const auto& jvl : it->second)
                    if (ivl == jvl) { found = true; break; }
                if (!found) return false;
            }
        }
        return true;
    }

    bool operator==(const Configuration& o) const { return data_ == o.data_; }
    bool operator!=(const Configuration& o) const { return data_ != o.data_; }
    bool operator<(const Configuration& o) const {
        auto a = data_.begin();
        auto b = o.data_.begin();
        for (; a != data_.end() && b != o.data_.end(); ++a, ++b) {
            if (a->first != b->first) return a->first < b->first;
            const auto& la = a->second;
            const auto& lb = b->second;
            for (std::size_t k = 0; k < la.size() && k < lb.size(); ++k) {
                if (la[k] != lb[k]) return la[k] < lb[k];
            }
            if (la.size() != lb.size()) return la.size() < lb.size();
        }
        return a == data_.end() && b != o.data_.end();
    }

    std::string to_string() const {
        if (data_.empty()) return "{}";
        std::string s = "{";
        bool first = true;
        for (const auto& [loc, list] : data_)
            for (const auto& ivl : list) {
                if (!first) s += ", ";
                first = false;
                s += "(" + loc + "," + ivl.to_string() + ")";
            }
        return s + "}";
    }

    std::size_t hash() const {
        std::size_t h = 1469598103u;
        for (const auto& [loc, list] : data_) {
            for (char c : loc) h = (h ^ static_cast<std::size_t>(c)) * 1099511628211ull;
            for (const auto& ivl : list) h = (h ^ ivl.hash()) * 1099511628211ull;
        }
        return h;
    }

private:
    std::map<std::string, std::vector<Interval>> data_;
};

inline Configuration time_elapse(const Configuration& c, const Rational& t) {
    if (t.is_negative()) throw std::invalid_argument("time_elapse: negative delay");
    return c.elapse(t);
}

inline std::size_t config_clock_copies(const Configuration& c) { return c.copies(); }

}  // namespace mitlkit

template <>
struct std::hash<mitlkit::Configuration> {
    std::size_t operator()(const mitlkit::Configuration& c) const { return c.hash(); }
};
