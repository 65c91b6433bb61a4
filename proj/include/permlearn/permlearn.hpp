#ifndef PERMLEARN_PERMLEARN_HPP
#define PERMLEARN_PERMLEARN_HPP

#include "permlearn/affine.hpp"
#include "permlearn/bit_vector.hpp"
#include "permlearn/config.hpp"
#include "permlearn/datasets.hpp"
#include "permlearn/errors.hpp"
#include "permlearn/image.hpp"
#include "permlearn/image_set.hpp"
#include "permlearn/match_index.hpp"
#include "permlearn/optimizer.hpp"
#include "permlearn/pair_set.hpp"
#include "permlearn/permutation.hpp"
#include "permlearn/pnm.hpp"
#include "permlearn/render.hpp"
#include "permlearn/rng.hpp"
#include "permlearn/serialization.hpp"

#endif  // PERMLEARN_PERMLEARN_HPP
