#pragma once

#include <gtest/gtest.h>

#include "prime/error.hpp"

// Asserts that `stmt` throws prime::Error carrying `expected_code`.
#define EXPECT_PRIME_ERROR(stmt, expected_code)                                   \
  do {                                                                            \
    try {                                                                         \
      stmt;                                                                       \
      ADD_FAILURE() << "expected " << ::prime::ErrorCodeName(expected_code)       \
                    << " from: " #stmt;                                           \
    } catch (const ::prime::Error& e) {                                           \
      EXPECT_EQ(e.code(), expected_code) << e.what();                             \
    }                                                                             \
  } while (0)
