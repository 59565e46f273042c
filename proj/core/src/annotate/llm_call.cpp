#include "adlforge/annotate/llm_call.hpp"

namespace adlforge::annotate {

std::string chat_structured_text(backends::BackendClient& chat, std::vector<backends::ChatMessage> messages,
                                 const std::function<void(const std::string&)>& check, const RetryPolicy& policy) {
  return chat_structured<std::string>(chat, std::move(messages),
                                      [&](const std::string& reply) {
                                        check(reply);
                                        return reply;
                                      },
                                      policy);
}

}  // namespace adlforge::annotate
