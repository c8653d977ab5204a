#pragma once

// Spectrum-sharing relay network library: seeded fading channels, distributed
// relay selection and clustering, closed-form and Monte Carlo secondary rates,
// interference-constrained power design, and the alternating relay protocol.

#include "ssrelay/arp.hpp"
#include "ssrelay/channel.hpp"
#include "ssrelay/config.hpp"
#include "ssrelay/io.hpp"
#include "ssrelay/optimize.hpp"
#include "ssrelay/rate.hpp"
#include "ssrelay/relay_control.hpp"
#include "ssrelay/rng.hpp"
#include "ssrelay/sim.hpp"
