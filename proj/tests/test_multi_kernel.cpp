#include <catch2/catch_amalgamated.hpp>
#include "bomkl/bomkl.hpp"
