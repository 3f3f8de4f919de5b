#pragma once

#include "pnsguard/photon_stats.hpp"

namespace fixtures {

inline const pnsguard::SourceParams kOurHbn{0.0363, 0.559, 0.185, 25e6};
inline const pnsguard::SourceParams kHbnHigh{0.80, 0.230, 0.050, 100e6};
inline const pnsguard::SourceParams kQd{0.75, 0.126, 0.0167, 100e6};

}  // namespace fixtures
