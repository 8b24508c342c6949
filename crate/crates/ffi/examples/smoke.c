#include <stdio.h>
#include "matrixprove.h"

int main(void) {
    const char *text = "fof(g, conjecture, (! [X] : p(X)) => p(a)).";
    MpProblem *problem = NULL;
    if (mp_parse(text, &problem) != MP_ERROR_CODE_OK) {
        fprintf(stderr, "parse: %s\n", mp_last_error_message());
        return 2;
    }
    MpResult *result = NULL;
    if (mp_prove(problem, MP_MODE_INTUITIONISTIC, 10000, 5, &result) != MP_ERROR_CODE_OK) {
        fprintf(stderr, "prove: %s\n", mp_last_error_message());
        return 3;
    }
    int code = 1;
    if (mp_result_status(result) == MP_STATUS_THEOREM) {
        char *json = mp_result_certificate_json(result);
        if (mp_check_certificate(problem, MP_MODE_INTUITIONISTIC, json) == MP_ERROR_CODE_OK) {
            printf("Theorem\n");
            code = 0;
        }
        mp_string_free(json);
    }
    mp_result_free(result);
    mp_problem_free(problem);
    return code;
}
