#pragma once

#include "newform/errors.hpp"
#include "newform/localfield.hpp"
#include "newform/cyclotomic.hpp"
#include "newform/group.hpp"
#include "newform/characters.hpp"
#include "newform/cosets.hpp"
#include "newform/indrep.hpp"
#include "newform/verify.hpp"
