#pragma once

#include "xfode/model.hpp"

#include <filesystem>
#include <string>

namespace xfode {

inline constexpr int kModelFormatVersion = 1;

/// JSON model document. Doubles are written in shortest round-trip form, so
/// save followed by load reproduces every parameter bit for bit.
std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace xfode
