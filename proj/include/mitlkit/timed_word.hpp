#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

#include "rational.hpp"

namespace mitlkit {

struct TimedEvent {
    std::string letter;
    Rational time;

    bool operator==(const TimedEvent&) const = default;
};

// Finite timed word: letters with nondecreasing rational timestamps.
// Time origin is 0, so the first delay equals the first timestamp.
class TimedWord {
public:
    TimedWord() = default;
    explicit TimedWord(std::vector<TimedEvent> events) : events_(std::move(events)) {
        validate();
    }

    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }
    const TimedEvent& operator[](std::size_t i) const { return events_[i]; }
    const std::vector<TimedEvent>& events() const { return events_; }

    // Delay before event i (0-based), measured from the previous event.
    Rational delay(std::size_t i) const {
        return i == 0 ? events_[0].time : events_[i].time - events_[i - 1].time;
    }

    std::vector<std::string> letters() const {
        std::vector<std::string> ls;
        ls.reserve(events_.size());
        for (const auto& e : events_) ls.push_back(e.letter);
        return ls;
    }

    bool operator==(const TimedWord& o) const { return events_ == o.events_; }

    // Text form "(a,0.1)(b,2)"; whitespace between tokens is ignored.
    static TimedWord parse(const std::string& text) {
        std::vector<TimedEvent> events;
        std::size_t pos = 0;
        auto skip_ws = [&] {
            while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        };
        skip_ws();
        while (pos < text.size()) {
            if (text[pos] != '(')
                throw std::invalid_argument("timed word: expected '(' at position " + std::to_string(pos));
            ++pos;
            skip_ws();
            std::string letter;
            while (pos < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
                letter += text[pos++];
            if (letter.empty())
                throw std::invalid_argument("timed word: missing letter at position " + std::to_string(pos));
            skip_ws();
            if (pos >= text.size() || text[pos] != ',')
                throw std::invalid_argument("timed word: expected ',' after letter '" + letter + "'");
            ++pos;
            skip_ws();
            std::string num;
            while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) ||
                                         text[pos] == '.' || text[pos] == '/'))
                num += text[pos++];
            skip_ws();
            if (pos >= text.size() || text[pos] != ')')
                throw std::invalid_argument("timed word: expected ')' after time of '" + letter + "'");
            ++pos;
            events.push_back({letter, Rational::parse(num)});
            skip_ws();
        }
        return TimedWord(std::move(events));
    }

    std::string to_string() const {
        std::string s;
        for (const auto& e : events_)
            s += "(" + e.letter + "," + e.time.to_string() + ")";
        return s;
    }

private:
    void validate() const {
        for (std::size_t i = 0; i < events_.size(); ++i) {
            if (events_[i].time.is_negative())
                throw std::invalid_argument("timed word: negative timestamp at event " + std::to_string(i));
            if (i > 0 && events_[i].time < events_[i - 1].time)
                throw std::invalid_argument("timed word: timestamps decrease at event " + std::to_string(i));
        }
    }

    std::vector<TimedEvent> events_;
};

}  // namespace mitlkit
