#pragma once

#define LEDFIT_VERSION "0.1.0"
