#include <doctest.h>
TEST_CASE("pipeline placeholder") { CHECK(true); }
