/**
 * Generated from archetype EMPLOYEE.
 * Identifier: employeeId.
 */
public class Employee {

    /** Object identifier. */
    private int employeeId;
    private String fullName;
}
