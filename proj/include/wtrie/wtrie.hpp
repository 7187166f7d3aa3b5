#pragma once

// Everything in one include.

#include "wtrie/append_fid.hpp"
#include "wtrie/bits.hpp"
#include "wtrie/dynamic_fid.hpp"
#include "wtrie/error.hpp"
#include "wtrie/hashed_wavelet_tree.hpp"
#include "wtrie/index_io.hpp"
#include "wtrie/oracle.hpp"
#include "wtrie/patricia.hpp"
#include "wtrie/rrr.hpp"
#include "wtrie/segment_stack.hpp"
#include "wtrie/serialize.hpp"
#include "wtrie/static_wavelet_trie.hpp"
#include "wtrie/string_index.hpp"
#include "wtrie/wavelet_trie.hpp"
