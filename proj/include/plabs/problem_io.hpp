#pragma once

// JSON problem documents of kind "abs-normal" or "cpl".

#include "plabs/core.hpp"
#include "plabs/cpl.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

namespace plabs {

struct ProblemDocument {
    std::variant<AbsNormalForm, CplSystem> data;
    std::optional<std::string> name;
    std::optional<std::uint64_t> seed;
    /// y* for solving F(x) = y*.
    std::optional<Vector> target;

    [[nodiscard]] bool is_form() const noexcept { return std::holds_alternative<AbsNormalForm>(data); }
    [[nodiscard]] const AbsNormalForm& form() const { return std::get<AbsNormalForm>(data); }
    [[nodiscard]] const CplSystem& cpl() const { return std::get<CplSystem>(data); }
};

/// Throws InvalidDocument on malformed input, including a non strictly
/// lower triangular L.
[[nodiscard]] ProblemDocument parse_document(const std::string& text);
[[nodiscard]] ProblemDocument load_document(const std::string& path);

/// Doubles are written in shortest round-trip form.
[[nodiscard]] std::string dump_document(const ProblemDocument& doc);
void save_document(const std::string& path, const ProblemDocument& doc);

} // namespace plabs
