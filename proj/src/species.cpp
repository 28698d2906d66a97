#include "molnet/species.hpp"

#include <cctype>
#include <charconv>
#include <stdexcept>

namespace molnet {

namespace {

char rail_char(Rail r) { return r == Rail::plus ? '+' : '-'; }

// Parses a 1-based decimal integer, advancing pos. Returns -1 on failure.
int parse_int(std::string_view s, size_t& pos) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), v);
    if (ec != std::errc() || v < 1) return -1;
    pos = size_t(p - s.data());
    return v;
}

bool valid_named(std::string_view base) {
    if (base.empty() || !std::isalpha(static_cast<unsigned char>(base[0]))) return false;
    for (char c : base)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

}  // namespace

Species Species::input(int i, Rail r) {
    return Species{SpeciesKind::input, 0, i, {}, r};
}

Species Species::intermediate(int l, int j, Rail r) {
    return Species{SpeciesKind::intermediate, l, j, {}, r};
}

Species Species::hidden(int l, int j, Rail r) {
    return Species{SpeciesKind::hidden, l, j, {}, r};
}

Species Species::mem(int l, int j) {
    return Species{SpeciesKind::mem, l, j, {}, Rail::none};
}

Species Species::waste() { return Species{}; }

Species Species::named(std::string_view text) {
    auto sp = parse(text);
    if (!sp) throw std::invalid_argument("bad species name: " + std::string(text));
    return *sp;
}

std::optional<Species> Species::parse(std::string_view s) {
    if (s.empty()) return std::nullopt;

    // Reserved grammar: X/I/H/M followed directly by a digit, and the bare W.
    char c0 = s[0];
    bool reserved = (c0 == 'X' || c0 == 'I' || c0 == 'H' || c0 == 'M') && s.size() > 1 &&
                    std::isdigit(static_cast<unsigned char>(s[1]));
    if (s == "W") return waste();

    if (reserved) {
        size_t pos = 1;
        int first = parse_int(s, pos);
        if (first < 0) return std::nullopt;
        if (c0 == 'X') {
            if (pos + 1 != s.size()) return std::nullopt;
            if (s[pos] == '+') return input(first, Rail::plus);
            if (s[pos] == '-') return input(first, Rail::minus);
            return std::nullopt;
        }
        // I, H, M share the <l>,<j> shape.
        if (pos >= s.size() || s[pos] != ',') return std::nullopt;
        ++pos;
        int second = parse_int(s, pos);
        if (second < 0) return std::nullopt;
        if (c0 == 'M') {
            if (pos != s.size()) return std::nullopt;
            return mem(first, second);
        }
        if (pos + 1 != s.size()) return std::nullopt;
        Rail r;
        if (s[pos] == '+') r = Rail::plus;
        else if (s[pos] == '-') r = Rail::minus;
        else return std::nullopt;
        return c0 == 'I' ? intermediate(first, second, r) : hidden(first, second, r);
    }

    // Free-form name, optional rail suffix.
    Rail r = Rail::none;
    std::string_view base = s;
    if (s.back() == '+' || s.back() == '-') {
        r = s.back() == '+' ? Rail::plus : Rail::minus;
        base = s.substr(0, s.size() - 1);
    }
    if (!valid_named(base)) return std::nullopt;
    return Species{SpeciesKind::named, 0, 0, std::string(base), r};
}

std::string Species::str() const {
    switch (kind) {
        case SpeciesKind::input:
            return "X" + std::to_string(index) + rail_char(rail);
        case SpeciesKind::intermediate:
            return "I" + std::to_string(layer) + "," + std::to_string(index) + rail_char(rail);
        case SpeciesKind::hidden:
            return "H" + std::to_string(layer) + "," + std::to_string(index) + rail_char(rail);
        case SpeciesKind::mem:
            return "M" + std::to_string(layer) + "," + std::to_string(index);
        case SpeciesKind::waste:
            return "W";
        case SpeciesKind::named:
            if (rail == Rail::none) return name;
            return name + rail_char(rail);
    }
    return {};
}

Species Species::partner() const {
    Species p = *this;
    p.rail = rail == Rail::plus ? Rail::minus : Rail::plus;
    return p;
}

Species Species::base() const {
    Species b = *this;
    if (b.has_rail()) b.rail = Rail::plus;
    return b;
}

}  // namespace molnet
