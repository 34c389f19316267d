#ifndef CARDFN_SPECFILE_HPP
#define CARDFN_SPECFILE_HPP

#include <string>
#include <string_view>

#include "cardfn/series.hpp"

namespace cardfn {

// Line-oriented `key = value` format:
//
//   label = "GN"
//   prefix = ["27/32"]
//   tail.kind = multigeometric
//   tail.coeffs = ["3/4", "1/2"]
//   tail.q = 1/4
//
// Kind-specific keys (with or without the `tail.` prefix): c, q for
// geometric; coeffs, q for multigeometric; base, sizes ("n", "2n+1", "3")
// and pattern ([["1@0", "1/2@1"], ["1@0"]]) for blocks. `#` starts a comment.
// Throws ParseError with the line and column of the offending text,
// including semantic problems found by validate().
SeriesSpec parse_spec(std::string_view text);

// Canonical text; parse_spec(render_spec(s)) == s.
std::string render_spec(const SeriesSpec& spec);

SeriesSpec load_spec_file(const std::string& path);

std::string render_size_rule(const SizeRule& rule);
// "n", "2n+1", "3". Throws Error(Parse).
SizeRule parse_size_rule(std::string_view text);

}  // namespace cardfn

#endif  // CARDFN_SPECFILE_HPP
