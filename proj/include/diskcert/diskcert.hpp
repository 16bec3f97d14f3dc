#pragma once

// Umbrella header.

#include "diskcert/certifier.hpp"
#include "diskcert/diffops.hpp"
#include "diskcert/energies.hpp"
#include "diskcert/error.hpp"
#include "diskcert/field_io.hpp"
#include "diskcert/fourier.hpp"
#include "diskcert/gallery.hpp"
#include "diskcert/grid.hpp"
#include "diskcert/report_json.hpp"
#include "diskcert/stationarity.hpp"
#include "diskcert/variation.hpp"
