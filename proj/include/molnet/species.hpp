#pragma once

// Species identity for dual-rail CRNs.
//
// Structured kinds follow the compiler's naming scheme (layer 1 is the
// input layer, so compiled species start at layer 2):
//   X<i>+ / X<i>-      network inputs, dual rail
//   I<l>,<j>+ / -      pre-activation intermediates of layer l, unit j
//   H<l>,<j>+ / -      layer outputs
//   M<l>,<j>           ReLU gadget memory species (no rail)
//   W                  inert waste
// Free-form names (A, B2, Leak+, ...) are kept for hand-written CRNs.
// parse() is the only constructor from text and canonicalizes, so the
// printable name and the structured identity stay a bijection.

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace molnet {

enum class Rail : uint8_t { plus = 0, minus = 1, none = 2 };

enum class SpeciesKind : uint8_t { input = 0, intermediate, hidden, mem, waste, named };

struct Species {
    // Field order fixes the default comparison: kind, layer, index, name,
    // rail, so a dual-rail pair sorts adjacently (S+ right before S-).
    SpeciesKind kind = SpeciesKind::waste;
    int32_t layer = 0;  // intermediate/hidden/mem only
    int32_t index = 0;  // 1-based unit or input index
    std::string name;   // named only, rail suffix stripped
    Rail rail = Rail::none;

    static Species input(int i, Rail r);
    static Species intermediate(int l, int j, Rail r);
    static Species hidden(int l, int j, Rail r);
    static Species mem(int l, int j);
    static Species waste();
    // Free-form name with optional trailing + or -. Canonicalizes to a
    // structured species when the text matches the reserved grammar;
    // throws std::invalid_argument on a malformed name.
    static Species named(std::string_view text);

    static std::optional<Species> parse(std::string_view text);

    std::string str() const;

    bool has_rail() const { return rail != Rail::none; }
    // Same species on the opposite rail. Caller must check has_rail().
    Species partner() const;
    // Plus-rail representative, used as the dual-rail pair key.
    Species base() const;

    auto operator<=>(const Species&) const = default;
    bool operator==(const Species&) const = default;
};

struct SpeciesHash {
    size_t operator()(const Species& s) const {
        size_t h = std::hash<std::string>()(s.name);
        h ^= (size_t(s.kind) << 1) | (size_t(s.rail) << 4);
        h ^= std::hash<int64_t>()((int64_t(s.layer) << 20) ^ s.index) << 1;
        return h;
    }
};

}  // namespace molnet
