#pragma once

#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "csakit/lexical.hpp"
#include "csakit/overlap.hpp"

namespace csakit {

// Every figure function returns false (after writing a warning) when there is
// nothing to draw; otherwise it writes a deterministic SVG.

bool bar_chart_svg(const std::string& title, const std::vector<std::pair<std::string, double>>& bars,
                   const std::filesystem::path& out, std::ostream& warnings);

// Target-leaning terms to the right, contrast-leaning to the left.
bool shift_chart_svg(const std::string& title, const ShiftSides& sides, const std::filesystem::path& out,
                     std::ostream& warnings);

bool wordcloud_svg(const std::string& title, const TermScoreTable& table, std::size_t max_words,
                   const std::filesystem::path& out, std::ostream& warnings);

// series name -> one value per category.
bool grouped_bar_svg(const std::string& title, const std::vector<std::string>& categories,
                     const std::map<std::string, std::vector<double>>& series,
                     const std::filesystem::path& out, std::ostream& warnings);

// Communities on a circle, chords weighted by shared authors.
bool overlap_svg(const OverlapMatrix& matrix, const std::filesystem::path& out, std::ostream& warnings);

}  // namespace csakit
