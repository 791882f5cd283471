// Copyright 2026 The Intentsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "corpus.hpp"

namespace intentsynth {

// Static domain grouping for the 150-intent corpus (10 domains x 15 intents)
// and the 20 schema-guided dialogue domains.

const std::map<std::string, std::vector<std::string>>& clinc150_intent_table() {
  static const std::map<std::string, std::vector<std::string>> kTable = {
      {"banking",
       {"transfer", "transactions", "balance", "freeze_account", "pay_bill",
        "bill_balance", "bill_due", "interest_rate", "routing", "min_payment",
        "order_checks", "pin_change", "report_fraud", "account_blocked",
        "spending_history"}},
      {"credit_cards",
       {"credit_score", "report_lost_card", "credit_limit", "rewards_balance",
        "new_card", "application_status", "card_declined",
        "international_fees", "apr", "redeem_rewards", "credit_limit_change",
        "damaged_card", "replacement_card_duration", "improve_credit_score",
        "expiration_date"}},
      {"kitchen_dining",
       {"recipe", "restaurant_reviews", "calories", "nutrition_info",
        "restaurant_suggestion", "ingredients_list", "ingredient_substitution",
        "cook_time", "food_last", "meal_suggestion", "restaurant_reservation",
        "confirm_reservation", "how_busy", "cancel_reservation",
        "accept_reservations"}},
      {"home",
       {"shopping_list", "shopping_list_update", "next_song", "play_music",
        "update_playlist", "todo_list", "todo_list_update", "calendar",
        "calendar_update", "what_song", "order", "order_status", "reminder",
        "reminder_update", "smart_home"}},
      {"auto_commute",
       {"traffic", "directions", "gas", "gas_type", "distance",
        "current_location", "mpg", "oil_change_when", "oil_change_how",
        "jump_start", "uber", "schedule_maintenance", "last_maintenance",
        "tire_pressure", "tire_change"}},
      {"travel",
       {"book_flight", "book_hotel", "car_rental", "travel_suggestion",
        "travel_alert", "travel_notification", "carry_on", "timezone",
        "vaccines", "translate", "flight_status", "international_visa",
        "lost_luggage", "plug_type", "exchange_rate"}},
      {"utility",
       {"time", "alarm", "share_location", "find_phone", "weather", "text",
        "spelling", "make_call", "timer", "date", "calculator",
        "measurement_conversion", "flip_coin", "roll_dice", "definition"}},
      {"work",
       {"direct_deposit", "pto_request", "taxes", "payday", "w2",
        "pto_balance", "pto_request_status", "next_holiday", "insurance",
        "insurance_change", "schedule_meeting", "pto_used", "meeting_schedule",
        "rollover_401k", "income"}},
      {"small_talk",
       {"greeting", "goodbye", "tell_joke", "where_are_you_from",
        "how_old_are_you", "what_is_your_name", "who_made_you", "thank_you",
        "what_can_i_ask_you", "what_are_your_hobbies", "do_you_have_pets",
        "are_you_a_bot", "meaning_of_life", "who_do_you_work_for",
        "fun_fact"}},
      {"meta",
       {"change_ai_name", "change_user_name", "cancel", "user_name",
        "reset_settings", "whisper_mode", "repeat", "no", "yes", "maybe",
        "change_language", "change_accent", "change_volume", "change_speed",
        "sync_device"}},
  };
  return kTable;
}

const std::vector<std::string>& clinc150_domains() {
  static const std::vector<std::string> kDomains = [] {
    std::vector<std::string> names;
    for (const auto& [domain, intents] : clinc150_intent_table()) {
      names.push_back(domain);
    }
    return names;
  }();
  return kDomains;
}

const std::string* clinc150_domain_of(const std::string& intent) {
  static const std::map<std::string, std::string> kIndex = [] {
    std::map<std::string, std::string> index;
    for (const auto& [domain, intents] : clinc150_intent_table()) {
      for (const auto& intent_name : intents) index[intent_name] = domain;
    }
    return index;
  }();
  auto it = kIndex.find(intent);
  return it == kIndex.end() ? nullptr : &it->second;
}

const std::vector<std::string>& sgd_domains() {
  static const std::vector<std::string> kDomains = {
      "restaurants", "media",   "events",   "music",        "movies",
      "flights",     "ride_sharing", "rental_cars", "buses", "hotels",
      "services",    "homes",   "banks",    "calendar",     "weather",
      "travel",      "alarm",   "payment",  "trains",       "messaging"};
  return kDomains;
}

}  // namespace intentsynth
