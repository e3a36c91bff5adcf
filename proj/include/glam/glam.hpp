#pragma once

// Umbrella header for the glam library.

#include "glam/bde.hpp"
#include "glam/denot.hpp"
#include "glam/error.hpp"
#include "glam/frontend.hpp"
#include "glam/machine.hpp"
#include "glam/prelude.hpp"
#include "glam/syntax.hpp"
#include "glam/typing.hpp"
