#pragma once

namespace sdcnn::cli {

// Entry point for the sdcnn command-line tool. Exit codes: 0 success,
// 1 configuration error, 2 data error, 3 numeric divergence, 4 partial
// sweep failure (some threshold rows failed, the rest completed).
int run(int argc, char** argv);

}  // namespace sdcnn::cli
