#pragma once

#include <string>

#include "tauforge/loop.hpp"

namespace tauforge {

// JSON record {"n", "N", "M", "coeffs": [[k, row, col, re, im], ...]}.
// Doubles are written with round-trip precision, so read(write(a)) == a bitwise.
std::string loop_to_json(const MatrixLoop& a);
MatrixLoop loop_from_json(const std::string& text);

void write_loop_file(const std::string& path, const MatrixLoop& a);
MatrixLoop read_loop_file(const std::string& path);

}  // namespace tauforge
