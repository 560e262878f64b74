#include "pinn/cli_app.hpp"

int main(int argc, char** argv) { return pinn::cli::run(argc, argv); }
