#pragma once

namespace gwt {

// Full command-line driver.  Returns the process exit code:
//   0 success
//   2 bad configuration or usage
//   3 a budget was exhausted (nodes, rejections, enumeration, truncation)
//   4 the conditioning event carries no mass
//   1 anything else
int run_cli(int argc, char** argv);

}  // namespace gwt
