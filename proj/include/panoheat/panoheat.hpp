#pragma once

#include "panoheat/analysis.hpp"
#include "panoheat/errors.hpp"
#include "panoheat/hdr_io.hpp"
#include "panoheat/heatsim.hpp"
#include "panoheat/image.hpp"
#include "panoheat/layout.hpp"
#include "panoheat/manifest.hpp"
#include "panoheat/mesh.hpp"
#include "panoheat/photometry.hpp"
#include "panoheat/png_io.hpp"
#include "panoheat/projection.hpp"
#include "panoheat/thermography.hpp"
