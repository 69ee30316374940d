#pragma once

#define FAIRFRONT_VERSION "0.1.0"
