#ifndef bnvc_bnvc_hpp
#define bnvc_bnvc_hpp

#include "bnvc/bounds.hpp"
#include "bnvc/config_index.hpp"
#include "bnvc/dataset.hpp"
#include "bnvc/error.hpp"
#include "bnvc/model.hpp"
#include "bnvc/optimizer.hpp"
#include "bnvc/random.hpp"
#include "bnvc/risk.hpp"
#include "bnvc/search.hpp"
#include "bnvc/serialization.hpp"

#endif // bnvc_bnvc_hpp
