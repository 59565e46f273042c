#pragma once

#include <functional>
#include <string>
#include <vector>

#include "adlforge/backends/client.hpp"

namespace adlforge::annotate {

struct RetryPolicy {
  /// Total attempts for unparseable replies.
  int attempts = 3;
  /// Total attempts when the reply parses but has the wrong item count.
  int arity_attempts = 2;
  std::string suffix = "Return ONLY the requested structure.";
};

/// Sends `messages` and hands the reply to `parse`. When `parse` throws
/// ParseError, the reply and the re-prompt suffix are appended to the
/// conversation and the call is repeated, up to the policy limits. The last
/// ParseError (with the raw reply) propagates.
template <typename T>
T chat_structured(backends::BackendClient& chat, std::vector<backends::ChatMessage> messages,
                  const std::function<T(const std::string&)>& parse, const RetryPolicy& policy = {});

std::string chat_structured_text(backends::BackendClient& chat, std::vector<backends::ChatMessage> messages,
                                 const std::function<void(const std::string&)>& check,
                                 const RetryPolicy& policy = {});

}  // namespace adlforge::annotate

#include "adlforge/annotate/llm_call_impl.hpp"
