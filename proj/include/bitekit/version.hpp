#pragma once

#define BITEKIT_VERSION "0.1.0"
