#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace presta {

// Analysis corners: early/late x rise/fall.
enum Corner : int { ER = 0, EF = 1, LR = 2, LF = 3 };

inline const char* corner_name(int c) {
    static const char* names[4] = {"ER", "EF", "LR", "LF"};
    return names[c];
}

inline int corner_from_name(const std::string& s) {
    for (int c = 0; c < 4; ++c)
        if (s == corner_name(c)) return c;
    return -1;
}

inline bool corner_is_early(int c) { return c == ER || c == EF; }
inline bool corner_is_rise(int c) { return c == ER || c == LR; }

// One value per corner, indexed by Corner.
struct FourCorner {
    std::array<double, 4> v{0.0, 0.0, 0.0, 0.0};

    double& operator[](int c) { return v[static_cast<size_t>(c)]; }
    double operator[](int c) const { return v[static_cast<size_t>(c)]; }
    bool operator==(const FourCorner&) const = default;
};

struct Point {
    int64_t x = 0;
    int64_t y = 0;
    bool operator==(const Point&) const = default;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class ArgError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class InternalError : public std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace presta
