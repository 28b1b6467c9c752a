#include "declab/experiment.hpp"

int main(int argc, char **argv) { return declab::cli(argc, argv); }
