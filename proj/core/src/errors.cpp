#include "stratwave/errors.hpp"
