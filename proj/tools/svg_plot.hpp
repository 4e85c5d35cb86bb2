/* Copyright 2026 The catattack Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef CATATTACK_TOOLS_SVG_PLOT_HPP_
#define CATATTACK_TOOLS_SVG_PLOT_HPP_

#include <ostream>
#include <string>
#include <vector>

namespace catattack::cli {

struct Series {
  std::string name;
  std::vector<double> y;
};

// One small line chart per series, side by side, sharing the x values.
void write_svg_panels(std::ostream& out, const std::string& x_label,
                      const std::vector<double>& x,
                      const std::vector<Series>& series);

}  // namespace catattack::cli

#endif  // CATATTACK_TOOLS_SVG_PLOT_HPP_
