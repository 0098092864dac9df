#include <dgla/cli.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    dgla::cli::Style out{dgla::cli::color_enabled(1)}, err{dgla::cli::color_enabled(2)};
    return dgla::cli::run(args, std::cout, std::cerr, out, err);
}
