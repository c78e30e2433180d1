#pragma once

#define RANKDIFF_VERSION_MAJOR 0
#define RANKDIFF_VERSION_MINOR 1
#define RANKDIFF_VERSION_PATCH 0
#define RANKDIFF_VERSION "0.1.0"
