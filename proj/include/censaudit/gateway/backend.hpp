#pragma once

#include "censaudit/gateway/types.hpp"

#include <string>

namespace censaudit::gateway {

class Backend {
 public:
  virtual ~Backend() = default;
  // Returns the completion text exactly as received. Throws GatewayError subtypes.
  virtual std::string send(const ModelSpec& model, const ChatPrompt& prompt,
                           const GenerationParams& params) = 0;
};

}  // namespace censaudit::gateway
