#pragma once

#include "adlforge/model/error.hpp"

namespace adlforge::annotate {

template <typename T>
T chat_structured(backends::BackendClient& chat, std::vector<backends::ChatMessage> messages,
                  const std::function<T(const std::string&)>& parse, const RetryPolicy& policy) {
  int parse_failures = 0;
  int arity_failures = 0;
  for (;;) {
    const std::string reply = chat.chat(messages);
    try {
      return parse(reply);
    } catch (const ArityError&) {
      if (++arity_failures >= policy.arity_attempts || parse_failures + arity_failures >= policy.attempts) throw;
    } catch (const ParseError&) {
      if (++parse_failures + arity_failures >= policy.attempts) throw;
    }
    messages.push_back({"assistant", reply});
    messages.push_back({"user", policy.suffix});
  }
}

}  // namespace adlforge::annotate
